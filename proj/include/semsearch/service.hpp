// Application shell: configuration, ingest cycles, snapshots, scheduling,
// and the JSON documents served by the HTTP API.
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "semsearch/ingest.hpp"
#include "semsearch/rdf.hpp"
#include "semsearch/reasoner.hpp"
#include "semsearch/search.hpp"
#include "semsearch/turtle.hpp"

namespace semsearch {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A failed ingest cycle; the previously published snapshot stays in place.
class CycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration

struct AppConfig {
  std::string history_export_path = "history.jsonl";
  std::string html_cache_dir = "html";
  std::string ontology_path = "ontology.ttl";
  std::optional<std::string> stopword_path;
  std::string snapshot_dir = "snapshot";
  int poll_interval_s = 900;
  std::string listen_addr = "127.0.0.1:8080";
  RankingWeights weights;
  int k_default = 10;

  void validate() const {
    if (poll_interval_s < 1) throw ConfigError("poll_interval_s must be >= 1");
    if (k_default < 1) throw ConfigError("k_default must be >= 1");
    for (const auto* p : {&history_export_path, &html_cache_dir, &ontology_path, &snapshot_dir}) {
      if (p->empty()) throw ConfigError("configured paths must not be empty");
    }
    if (stopword_path && stopword_path->empty()) throw ConfigError("stopword_path must not be empty");
    try {
      weights.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    split_listen_addr();
  }

  std::pair<std::string, int> split_listen_addr() const {
    auto colon = listen_addr.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("listen_addr must be host:port");
    int port = 0;
    try {
      std::size_t used = 0;
      port = std::stoi(listen_addr.substr(colon + 1), &used);
      if (used != listen_addr.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("listen_addr has a bad port: " + listen_addr);
    }
    if (port < 0 || port > 65535) throw ConfigError("listen_addr port out of range");
    return {listen_addr.substr(0, colon), port};
  }
};

namespace service_detail {

inline int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + " must be an integer, got '" + text + "'");
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + " must be a number, got '" + text + "'");
}

}  // namespace service_detail

// Applies the keys of a JSON config document. Relative paths resolve against
// `base_dir`. Unknown keys are rejected.
inline void apply_config_json(AppConfig& cfg, const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  auto path_value = [&](const std::string& key, const nlohmann::json& v) {
    if (!v.is_string()) throw ConfigError(key + " must be a string");
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.string();
  };
  auto int_value = [](const std::string& key, const nlohmann::json& v) {
    if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
    return v.get<int>();
  };
  auto number_value = [](const std::string& key, const nlohmann::json& v) {
    if (!v.is_number()) throw ConfigError(key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : doc.items()) {
    if (key == "history_export_path") {
      cfg.history_export_path = path_value(key, v);
    } else if (key == "html_cache_dir") {
      cfg.html_cache_dir = path_value(key, v);
    } else if (key == "ontology_path") {
      cfg.ontology_path = path_value(key, v);
    } else if (key == "stopword_path") {
      if (v.is_null()) {
        cfg.stopword_path.reset();
      } else {
        cfg.stopword_path = path_value(key, v);
      }
    } else if (key == "snapshot_dir") {
      cfg.snapshot_dir = path_value(key, v);
    } else if (key == "poll_interval_s") {
      cfg.poll_interval_s = int_value(key, v);
    } else if (key == "listen_addr") {
      if (!v.is_string()) throw ConfigError("listen_addr must be a string");
      cfg.listen_addr = v.get<std::string>();
    } else if (key == "k_default") {
      cfg.k_default = int_value(key, v);
    } else if (key == "weights") {
      if (!v.is_object()) throw ConfigError("weights must be an object");
      for (const auto& [wk, wv] : v.items()) {
        if (wk == "w_class") {
          cfg.weights.w_class = number_value(wk, wv);
        } else if (wk == "w_overlap") {
          cfg.weights.w_overlap = number_value(wk, wv);
        } else if (wk == "w_visits") {
          cfg.weights.w_visits = number_value(wk, wv);
        } else {
          throw ConfigError("unknown weights key: " + wk);
        }
      }
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

inline void apply_config_file(AppConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  apply_config_json(cfg, doc, path.parent_path());
}

using EnvLookup = std::function<const char*(const char*)>;

// SEMSEARCH_* environment overrides.
inline void apply_config_env(AppConfig& cfg, const EnvLookup& getenv_fn = [](const char* k) { return std::getenv(k); }) {
  auto get = [&](const char* key) -> std::optional<std::string> {
    const char* v = getenv_fn(key);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("SEMSEARCH_HISTORY")) cfg.history_export_path = *v;
  if (auto v = get("SEMSEARCH_HTML_CACHE")) cfg.html_cache_dir = *v;
  if (auto v = get("SEMSEARCH_ONTOLOGY")) cfg.ontology_path = *v;
  if (auto v = get("SEMSEARCH_STOPWORDS")) cfg.stopword_path = *v;
  if (auto v = get("SEMSEARCH_SNAPSHOT_DIR")) cfg.snapshot_dir = *v;
  if (auto v = get("SEMSEARCH_POLL_INTERVAL")) cfg.poll_interval_s = service_detail::parse_int("SEMSEARCH_POLL_INTERVAL", *v);
  if (auto v = get("SEMSEARCH_LISTEN")) cfg.listen_addr = *v;
  if (auto v = get("SEMSEARCH_K")) cfg.k_default = service_detail::parse_int("SEMSEARCH_K", *v);
  if (auto v = get("SEMSEARCH_W_CLASS")) cfg.weights.w_class = service_detail::parse_double("SEMSEARCH_W_CLASS", *v);
  if (auto v = get("SEMSEARCH_W_OVERLAP")) cfg.weights.w_overlap = service_detail::parse_double("SEMSEARCH_W_OVERLAP", *v);
  if (auto v = get("SEMSEARCH_W_VISITS")) cfg.weights.w_visits = service_detail::parse_double("SEMSEARCH_W_VISITS", *v);
}

// ---------------------------------------------------------------------------
// Snapshots

struct SnapshotCounts {
  std::size_t pages = 0;
  std::size_t classes = 0;
  std::size_t triples = 0;
};

struct Snapshot {
  Graph base;      // ontology plus ingested individuals, as asserted
  Graph inferred;  // materialized base
  std::vector<Violation> violations;
  std::chrono::system_clock::time_point built_at;
  SnapshotCounts counts;
  PrefixMap prefixes;
  Tokenizer tokenizer;
  std::size_t skipped_records = 0;
  std::size_t new_pages = 0;  // pages absent from the previous snapshot
  std::vector<std::string> warnings;
};

inline std::int64_t to_epoch_ms(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

namespace service_detail {

inline PrefixMap merged_prefixes(const PrefixMap& document) {
  PrefixMap out = PrefixMap::standard();
  for (const auto& [label, iri] : document.entries()) out.set(label, iri);
  return out;
}

inline std::shared_ptr<Snapshot> assemble(Graph base, PrefixMap prefixes, Tokenizer tokenizer) {
  auto snap = std::make_shared<Snapshot>();
  auto report = materialize_with_report(base);
  snap->inferred = std::move(report.graph);
  snap->warnings = std::move(report.warnings);
  snap->violations = check_consistency(snap->inferred);
  snap->base = std::move(base);
  snap->prefixes = std::move(prefixes);
  snap->tokenizer = std::move(tokenizer);
  snap->built_at = std::chrono::system_clock::now();
  snap->counts.pages = snap->base.subjects(vocab::type, vocab::web_page).size();
  snap->counts.classes = named_classes(snap->inferred).size();
  snap->counts.triples = snap->inferred.size();
  return snap;
}

// Inverse of page_triples, for pages carried over from an earlier snapshot.
inline HistoryRecord record_from_graph(const Graph& g, const Term& page) {
  HistoryRecord rec;
  rec.url = page.value();
  auto text = [&](const Term& p) -> std::optional<std::string> {
    auto v = g.first_object(page, p);
    if (v && v->is_literal()) return v->value();
    return std::nullopt;
  };
  auto count = [&](const Term& p) -> std::int64_t {
    auto v = text(p);
    if (!v) return 0;
    try {
      return std::stoll(*v);
    } catch (const std::exception&) {
      return 0;
    }
  };
  rec.title = text(vocab::label);
  rec.description = text(vocab::comment);
  rec.visit_count = count(vocab::visit_count);
  rec.last_visit_us = count(vocab::last_visit);
  return rec;
}

inline Tokenizer make_tokenizer(const AppConfig& cfg) {
  return cfg.stopword_path ? Tokenizer::from_file(*cfg.stopword_path) : Tokenizer();
}

}  // namespace service_detail

// Loads the ontology, ingests the history export, classifies pages,
// materializes, and checks consistency. Throws CycleError on any fatal
// problem (unparsable ontology, unreadable export or stopword file).
inline std::shared_ptr<const Snapshot> run_ingest_cycle(const AppConfig& cfg,
                                                        const std::shared_ptr<const Snapshot>& previous = nullptr) {
  std::string ontology_text;
  {
    std::ifstream in(cfg.ontology_path, std::ios::binary);
    if (!in) throw CycleError("cannot read ontology " + cfg.ontology_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ontology_text = buffer.str();
  }
  TurtleDocument ontology;
  try {
    ontology = parse_turtle(ontology_text);
  } catch (const ParseError& e) {
    throw CycleError("ontology " + cfg.ontology_path + ":" + e.what());
  }

  Tokenizer tokenizer;
  HistoryBatch batch;
  try {
    tokenizer = service_detail::make_tokenizer(cfg);
    batch = read_history_file(cfg.history_export_path);
  } catch (const IngestError& e) {
    throw CycleError(e.what());
  }

  Graph schema = materialize(ontology.graph);
  auto lexicons = lexicons_from_ontology(schema);

  GraphBuilder base(ontology.graph);
  std::size_t new_pages = 0;
  for (auto& rec : batch.records) {
    enrich_from_cache(rec, cfg.html_cache_dir);
    auto cls = classify(rec, lexicons, schema, tokenizer);
    for (auto& t : page_triples(rec, cls)) base.insert(std::move(t));
    if (previous && !previous->base.contains(Term::iri(rec.url), vocab::type, vocab::web_page)) ++new_pages;
  }
  // Pages that left the export stay; they are reclassified like the rest.
  if (previous) {
    std::set<std::string> seen;
    for (const auto& rec : batch.records) seen.insert(rec.url);
    for (const auto& page : previous->base.subjects(vocab::type, vocab::web_page)) {
      if (!page.is_iri() || seen.count(page.value())) continue;
      auto rec = service_detail::record_from_graph(previous->base, page);
      auto cls = classify(rec, lexicons, schema, tokenizer);
      for (auto& t : page_triples(rec, cls)) base.insert(std::move(t));
    }
  }

  auto snap = service_detail::assemble(base.freeze(), service_detail::merged_prefixes(ontology.prefixes),
                                       std::move(tokenizer));
  snap->skipped_records = batch.skipped;
  snap->new_pages = previous ? new_pages : snap->counts.pages;
  return snap;
}

inline constexpr const char* kSnapshotGraphFile = "snapshot.ttl";
inline constexpr const char* kSnapshotMetaFile = "snapshot.json";

namespace service_detail {

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CycleError("cannot write " + tmp.string());
    out << content;
    if (!out) throw CycleError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace service_detail

// Writes the asserted graph as Turtle plus a metadata sidecar.
inline void save_snapshot(const Snapshot& snap, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  service_detail::write_atomically(dir / kSnapshotGraphFile, serialize_turtle(snap.base, snap.prefixes));
  nlohmann::json meta = {
      {"built_at_ms", to_epoch_ms(snap.built_at)},
      {"pages", snap.counts.pages},
      {"classes", snap.counts.classes},
      {"triples", snap.counts.triples},
      {"skipped_records", snap.skipped_records},
      {"violations", snap.violations.size()},
  };
  service_detail::write_atomically(dir / kSnapshotMetaFile, meta.dump(2) + "\n");
}

// Rebuilds a snapshot from disk; nullopt when no snapshot was saved there.
inline std::shared_ptr<const Snapshot> load_snapshot(const std::filesystem::path& dir, Tokenizer tokenizer = {}) {
  std::ifstream in(dir / kSnapshotGraphFile, std::ios::binary);
  if (!in) return nullptr;
  std::stringstream buffer;
  buffer << in.rdbuf();
  TurtleDocument doc;
  try {
    doc = parse_turtle(buffer.str());
  } catch (const ParseError& e) {
    throw CycleError("snapshot " + (dir / kSnapshotGraphFile).string() + ":" + e.what());
  }
  auto snap = service_detail::assemble(std::move(doc.graph), service_detail::merged_prefixes(doc.prefixes),
                                       std::move(tokenizer));
  std::ifstream meta_in(dir / kSnapshotMetaFile);
  if (meta_in) {
    auto meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (!meta.is_discarded() && meta.contains("built_at_ms") && meta["built_at_ms"].is_number_integer()) {
      snap->built_at = std::chrono::system_clock::time_point(std::chrono::milliseconds(meta["built_at_ms"].get<std::int64_t>()));
    }
    if (!meta.is_discarded() && meta.contains("skipped_records") && meta["skipped_records"].is_number_unsigned()) {
      snap->skipped_records = meta["skipped_records"].get<std::size_t>();
    }
  }
  return snap;
}

// Holds the published snapshot. Readers copy the pointer; the swap is the
// only synchronization point.
class SnapshotStore {
 public:
  std::shared_ptr<const Snapshot> current() const {
    std::lock_guard lock(mu_);
    return current_;
  }

  void publish(std::shared_ptr<const Snapshot> snap) {
    std::lock_guard lock(mu_);
    current_ = std::move(snap);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
};

struct CycleOutcome {
  bool ok = false;
  std::string error;
  std::shared_ptr<const Snapshot> snapshot;  // the snapshot serving afterwards
};

// Runs ingest cycles (on demand and on a timer) and publishes results.
class Service {
 public:
  explicit Service(AppConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
  ~Service() { stop(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const AppConfig& config() const { return cfg_; }
  const SnapshotStore& store() const { return store_; }

  // Publishes a persisted snapshot, if one exists. Returns true on success.
  bool restore() {
    auto snap = load_snapshot(cfg_.snapshot_dir, service_detail::make_tokenizer(cfg_));
    if (!snap) return false;
    store_.publish(std::move(snap));
    return true;
  }

  // One exclusive cycle. On failure the previous snapshot keeps serving.
  CycleOutcome ingest_now() {
    std::lock_guard cycle_lock(cycle_mu_);
    CycleOutcome outcome;
    try {
      auto snap = run_ingest_cycle(cfg_, store_.current());
      save_snapshot(*snap, cfg_.snapshot_dir);
      store_.publish(snap);
      outcome.ok = true;
      set_last_error({});
    } catch (const std::exception& e) {
      outcome.error = e.what();
      set_last_error(outcome.error);
    }
    outcome.snapshot = store_.current();
    return outcome;
  }

  std::string last_error() const {
    std::lock_guard lock(error_mu_);
    return last_error_;
  }

  // Runs a cycle immediately, then every poll_interval_s until stop().
  void start_scheduler(std::function<void(const CycleOutcome&)> on_cycle = {}) {
    if (worker_.joinable()) return;
    stopping_ = false;
    worker_ = std::thread([this, on_cycle = std::move(on_cycle)] {
      std::unique_lock lock(wait_mu_);
      while (!stopping_) {
        lock.unlock();
        auto outcome = ingest_now();
        if (on_cycle) on_cycle(outcome);
        lock.lock();
        wake_.wait_for(lock, std::chrono::seconds(cfg_.poll_interval_s), [this] { return stopping_.load(); });
      }
    });
  }

  void stop() {
    {
      std::lock_guard lock(wait_mu_);
      stopping_ = true;
    }
    wake_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

 private:
  void set_last_error(std::string e) {
    std::lock_guard lock(error_mu_);
    last_error_ = std::move(e);
  }

  AppConfig cfg_;
  SnapshotStore store_;
  std::mutex cycle_mu_;
  mutable std::mutex error_mu_;
  std::string last_error_;
  std::mutex wait_mu_;
  std::condition_variable wake_;
  std::atomic<bool> stopping_{false};
  std::thread worker_;
};

// ---------------------------------------------------------------------------
// API documents

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

inline ApiResponse error_response(int status, std::string code, std::string message) {
  return {status, {{"error", {{"code", std::move(code)}, {"message", std::move(message)}}}}};
}

namespace service_detail {

inline nlohmann::json optional_text(const std::optional<std::string>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace service_detail

// GET /search?q=&k=
inline ApiResponse handle_search(const Snapshot* snap, const std::optional<std::string>& q,
                                 const std::optional<std::string>& k, const AppConfig& cfg) {
  if (!q) return error_response(400, "missing_query", "query parameter q is required");
  long long limit = cfg.k_default;
  if (k) {
    try {
      std::size_t used = 0;
      limit = std::stoll(*k, &used);
      if (used != k->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      return error_response(400, "invalid_k", "k must be a positive integer");
    }
    if (limit < 1) return error_response(400, "invalid_k", "k must be a positive integer");
  }
  if (!snap) return error_response(503, "no_snapshot", "no snapshot has been built yet");

  auto results = search(snap->inferred, *q, static_cast<std::size_t>(limit), cfg.weights, snap->tokenizer);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"url", r.url},
                    {"title", service_detail::optional_text(r.title)},
                    {"snippet", service_detail::optional_text(r.snippet)},
                    {"class", service_detail::optional_text(r.class_iri)},
                    {"score", r.score}});
  }
  return {200, {{"query", *q}, {"count", results.size()}, {"results", std::move(rows)}}};
}

// Validates a /search response body; returns an empty string when valid.
inline std::string validate_search_response(const nlohmann::json& doc) {
  if (!doc.is_object()) return "response is not an object";
  for (const char* key : {"query", "count", "results"}) {
    if (!doc.contains(key)) return std::string("missing field ") + key;
  }
  if (doc.size() != 3) return "unexpected top-level fields";
  if (!doc["query"].is_string()) return "query is not a string";
  if (!doc["count"].is_number_integer() || doc["count"].get<std::int64_t>() < 0) {
    return "count is not a non-negative integer";
  }
  if (!doc["results"].is_array()) return "results is not an array";
  if (doc["count"].get<std::size_t>() != doc["results"].size()) return "count does not match results";
  for (const auto& r : doc["results"]) {
    if (!r.is_object() || r.size() != 5) return "result is not an object with exactly 5 fields";
    if (!r.contains("url") || !r["url"].is_string()) return "result url is not a string";
    for (const char* key : {"title", "snippet", "class"}) {
      if (!r.contains(key) || !(r[key].is_string() || r[key].is_null())) {
        return std::string("result ") + key + " is not a string or null";
      }
    }
    if (!r.contains("score") || !r["score"].is_number() || !(r["score"].get<double>() > 0)) {
      return "result score is not a positive number";
    }
  }
  return {};
}

// GET /classes: the named class tree with direct children.
inline ApiResponse handle_classes(const Snapshot* snap) {
  if (!snap) return error_response(503, "no_snapshot", "no snapshot has been built yet");
  const Graph& g = snap->inferred;
  auto classes = named_classes(g);

  std::function<nlohmann::json(const Term&, std::set<Term>&)> node = [&](const Term& c, std::set<Term>& path) {
    nlohmann::json children = nlohmann::json::array();
    path.insert(c);
    for (const auto& child : subclasses(g, c, QueryMode::kDirect)) {
      if (classes.count(child) && !path.count(child)) children.push_back(node(child, path));
    }
    path.erase(c);
    auto label = g.first_object(c, vocab::label);
    return nlohmann::json{{"iri", c.value()},
                          {"label", label && label->is_literal() ? nlohmann::json(label->value()) : nlohmann::json(nullptr)},
                          {"instances", instances(g, c, QueryMode::kAll).size()},
                          {"children", std::move(children)}};
  };

  nlohmann::json roots = nlohmann::json::array();
  for (const auto& c : classes) {
    auto up = superclasses(g, c, QueryMode::kAll);
    bool has_named_parent = std::any_of(up.begin(), up.end(), [&](const Term& p) {
      return classes.count(p) && !g.contains(p, vocab::sub_class_of, c);
    });
    if (has_named_parent) continue;
    std::set<Term> path;
    roots.push_back(node(c, path));
  }
  nlohmann::json prefixes = nlohmann::json::object();
  for (const auto& [label, iri] : snap->prefixes.entries()) prefixes[label] = iri;
  return {200, {{"prefixes", std::move(prefixes)}, {"classes", std::move(roots)}}};
}

inline nlohmann::json violation_json(const Violation& v) {
  nlohmann::json participants = nlohmann::json::array();
  for (const auto& p : v.participants) participants.push_back(p.to_string());
  return {{"kind", std::string(violation_kind_name(v.kind))},
          {"focus", v.focus.to_string()},
          {"participants", std::move(participants)},
          {"detail", v.detail}};
}

// GET /violations
inline ApiResponse handle_violations(const Snapshot* snap) {
  if (!snap) return error_response(503, "no_snapshot", "no snapshot has been built yet");
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : snap->violations) list.push_back(violation_json(v));
  return {200, {{"count", snap->violations.size()}, {"violations", std::move(list)}}};
}

// GET /health
inline ApiResponse handle_health(const Snapshot* snap, const std::string& last_error) {
  nlohmann::json body = {{"status", snap ? "ok" : "starting"}};
  if (!last_error.empty()) body["last_error"] = last_error;
  if (snap) {
    body["built_at_ms"] = to_epoch_ms(snap->built_at);
    body["counts"] = {{"pages", snap->counts.pages}, {"classes", snap->counts.classes}, {"triples", snap->counts.triples}};
    body["violations"] = snap->violations.size();
  }
  return {snap ? 200 : 503, std::move(body)};
}

// POST /ingest
inline ApiResponse handle_ingest(Service& service) {
  auto outcome = service.ingest_now();
  if (!outcome.ok) return error_response(500, "ingest_failed", outcome.error);
  const auto& s = *outcome.snapshot;
  return {200,
          {{"status", "ok"},
           {"built_at_ms", to_epoch_ms(s.built_at)},
           {"counts", {{"pages", s.counts.pages}, {"classes", s.counts.classes}, {"triples", s.counts.triples}}},
           {"skipped_records", s.skipped_records},
           {"violations", s.violations.size()}}};
}

}  // namespace semsearch
