// semsearch: ingest browsing history into an ontology-backed knowledge base
// and search it.
//
//   semsearch [options] serve | ingest | search <q> | query <sparql> | check | reason

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "semsearch/http.hpp"
#include "semsearch/service.hpp"
#include "semsearch/sparql.hpp"

namespace {

volatile std::sig_atomic_t g_stop_requested = 0;

void on_signal(int) { g_stop_requested = 1; }

struct Overrides {
  std::string config;
  std::string history;
  std::string html_cache;
  std::string ontology;
  std::string stopwords;
  std::string snapshot_dir;
  std::string listen;
  std::optional<int> poll_interval;
  std::optional<int> k_default;
  std::optional<double> w_class;
  std::optional<double> w_overlap;
  std::optional<double> w_visits;
};

// defaults < config file < environment < flags
semsearch::AppConfig resolve_config(const Overrides& o) {
  semsearch::AppConfig cfg;
  std::string config_path = o.config;
  if (config_path.empty()) {
    if (const char* env = std::getenv("SEMSEARCH_CONFIG")) config_path = env;
  }
  if (!config_path.empty()) semsearch::apply_config_file(cfg, config_path);
  semsearch::apply_config_env(cfg);
  if (!o.history.empty()) cfg.history_export_path = o.history;
  if (!o.html_cache.empty()) cfg.html_cache_dir = o.html_cache;
  if (!o.ontology.empty()) cfg.ontology_path = o.ontology;
  if (!o.stopwords.empty()) cfg.stopword_path = o.stopwords;
  if (!o.snapshot_dir.empty()) cfg.snapshot_dir = o.snapshot_dir;
  if (!o.listen.empty()) cfg.listen_addr = o.listen;
  if (o.poll_interval) cfg.poll_interval_s = *o.poll_interval;
  if (o.k_default) cfg.k_default = *o.k_default;
  if (o.w_class) cfg.weights.w_class = *o.w_class;
  if (o.w_overlap) cfg.weights.w_overlap = *o.w_overlap;
  if (o.w_visits) cfg.weights.w_visits = *o.w_visits;
  cfg.validate();
  return cfg;
}

std::shared_ptr<const semsearch::Snapshot> require_snapshot(const semsearch::AppConfig& cfg) {
  auto snap = semsearch::load_snapshot(cfg.snapshot_dir, cfg.stopword_path
                                                             ? semsearch::Tokenizer::from_file(*cfg.stopword_path)
                                                             : semsearch::Tokenizer());
  if (!snap) {
    throw std::runtime_error("no snapshot in " + cfg.snapshot_dir + "; run 'semsearch ingest' first");
  }
  return snap;
}

std::string counts_line(const semsearch::Snapshot& s) {
  std::ostringstream out;
  out << "pages=" << s.counts.pages << " classes=" << s.counts.classes << " triples=" << s.counts.triples
      << " skipped=" << s.skipped_records << " violations=" << s.violations.size() << " new=" << s.new_pages;
  return out.str();
}

int cmd_ingest(const semsearch::AppConfig& cfg) {
  std::shared_ptr<const semsearch::Snapshot> previous;
  try {
    previous = semsearch::load_snapshot(cfg.snapshot_dir);
  } catch (const semsearch::CycleError& e) {
    std::cerr << "ignoring unreadable snapshot: " << e.what() << "\n";
  }
  auto snap = semsearch::run_ingest_cycle(cfg, previous);
  semsearch::save_snapshot(*snap, cfg.snapshot_dir);
  std::cout << counts_line(*snap) << "\n";
  for (const auto& w : snap->warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_search(const semsearch::AppConfig& cfg, const std::string& q, std::optional<int> k) {
  auto snap = require_snapshot(cfg);
  int limit = k.value_or(cfg.k_default);
  if (limit < 1) throw std::invalid_argument("k must be >= 1");
  auto results = semsearch::search(snap->inferred, q, static_cast<std::size_t>(limit), cfg.weights, snap->tokenizer);
  std::cout << std::left << std::setw(5) << "rank" << std::setw(9) << "score" << std::setw(20) << "class"
            << "title / url\n";
  int rank = 1;
  for (const auto& r : results) {
    std::string cls = "-";
    if (r.class_iri) cls = semsearch::render_term(semsearch::Term::iri(*r.class_iri), snap->prefixes);
    std::ostringstream score;
    score << std::fixed << std::setprecision(4) << r.score;
    std::cout << std::left << std::setw(5) << rank++ << std::setw(9) << score.str() << std::setw(20) << cls
              << r.title.value_or("(untitled)") << "\n"
              << std::string(34, ' ') << r.url << "\n";
  }
  std::cout << results.size() << (results.size() == 1 ? " result\n" : " results\n");
  return 0;
}

int cmd_query(const semsearch::AppConfig& cfg, const std::string& text) {
  auto snap = require_snapshot(cfg);
  auto query = semsearch::parse_query(text, snap->prefixes);
  std::cout << semsearch::format_table(semsearch::execute(query, snap->inferred), snap->prefixes);
  return 0;
}

int cmd_check(const semsearch::AppConfig& cfg) {
  auto snap = require_snapshot(cfg);
  for (const auto& v : snap->violations) {
    std::cout << semsearch::violation_kind_name(v.kind) << "\t" << semsearch::render_term(v.focus, snap->prefixes)
              << "\t" << v.detail << "\n";
  }
  std::cout << snap->violations.size() << (snap->violations.size() == 1 ? " violation\n" : " violations\n");
  return snap->violations.empty() ? 0 : 1;
}

int cmd_reason(const semsearch::AppConfig& cfg, const std::string& output) {
  auto snap = require_snapshot(cfg);
  auto text = semsearch::serialize_turtle(snap->inferred, snap->prefixes);
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + output);
    out << text;
  }
  for (const auto& w : snap->warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_serve(const semsearch::AppConfig& cfg) {
  semsearch::Service service(cfg);
  try {
    if (service.restore()) std::cerr << "restored snapshot from " << cfg.snapshot_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "ignoring unreadable snapshot: " << e.what() << "\n";
  }

  httplib::Server server;
  semsearch::mount_routes(server, service);
  auto [host, port] = cfg.split_listen_addr();
  if (!server.bind_to_port(host, port)) {
    std::cerr << "cannot listen on " << cfg.listen_addr << "\n";
    return 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&server] {
    while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });

  service.start_scheduler([](const semsearch::CycleOutcome& outcome) {
    if (outcome.ok) {
      std::cerr << "cycle ok: " << counts_line(*outcome.snapshot) << "\n";
    } else {
      std::cerr << "cycle aborted: " << outcome.error << "\n";
    }
  });
  std::cerr << "listening on " << cfg.listen_addr << "\n";
  server.listen_after_bind();

  g_stop_requested = 1;
  watcher.join();
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic search over browsing history"};
  app.require_subcommand(1);

  Overrides o;
  app.add_option("-c,--config", o.config, "JSON config file (also SEMSEARCH_CONFIG)");
  app.add_option("--history", o.history, "history export (one JSON record per line)");
  app.add_option("--html-cache", o.html_cache, "directory of <sha256(url)>.html files");
  app.add_option("--ontology", o.ontology, "ontology in Turtle");
  app.add_option("--stopwords", o.stopwords, "stopword file");
  app.add_option("--snapshot-dir", o.snapshot_dir, "where snapshots are written and read");
  app.add_option("--listen", o.listen, "host:port for serve");
  app.add_option("--poll-interval", o.poll_interval, "seconds between ingest cycles");
  app.add_option("--k-default", o.k_default, "default result count");
  app.add_option("--w-class", o.w_class, "ranking weight for class membership");
  app.add_option("--w-overlap", o.w_overlap, "ranking weight for text overlap");
  app.add_option("--w-visits", o.w_visits, "ranking weight for ln(1 + visits)");

  auto* serve = app.add_subcommand("serve", "run ingest cycles periodically and serve the HTTP API");
  auto* ingest = app.add_subcommand("ingest", "run one ingest cycle and print counts");

  std::string search_text;
  std::optional<int> search_k;
  auto* search = app.add_subcommand("search", "search the latest snapshot");
  search->add_option("query", search_text, "keywords")->required();
  search->add_option("-k", search_k, "number of results");

  std::string sparql_text;
  auto* query = app.add_subcommand("query", "run a SPARQL SELECT over the latest snapshot");
  query->add_option("sparql", sparql_text, "query text")->required();

  auto* check = app.add_subcommand("check", "print consistency violations; exit 1 if any");

  std::string reason_output;
  auto* reason = app.add_subcommand("reason", "write the materialized graph as Turtle");
  reason->add_option("-o,--output", reason_output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto cfg = resolve_config(o);
    if (*serve) return cmd_serve(cfg);
    if (*ingest) return cmd_ingest(cfg);
    if (*search) return cmd_search(cfg, search_text, search_k);
    if (*query) return cmd_query(cfg, sparql_text);
    if (*check) return cmd_check(cfg);
    if (*reason) return cmd_reason(cfg, reason_output);
  } catch (const semsearch::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const semsearch::CycleError& e) {
    std::cerr << "ingest aborted: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
