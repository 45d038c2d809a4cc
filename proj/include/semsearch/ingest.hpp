// Browsing-history ingestion: export reader, HTML metadata extraction,
// tokenization, lexicon classification, and page individuals as triples.
#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "semsearch/rdf.hpp"
#include "semsearch/reasoner.hpp"
#include "semsearch/syntax.hpp"

namespace semsearch {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Packaged default; data/stopwords.txt carries the same list.
inline const std::vector<std::string_view>& default_stopwords() {
  static const std::vector<std::string_view> kWords = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
    "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
    "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only",
    "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there",
    "these", "they", "this", "those", "through", "to", "too", "under", "until", "up", "very", "vs",
    "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will",
    "with", "would", "you", "your", "yours", "yourself", "yourselves",
  };
  return kWords;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace ingest_detail {

// Decodes one UTF-8 sequence at s[i]; invalid bytes decode as themselves.
inline std::uint32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b = static_cast<unsigned char>(s[i]);
  int extra = b >= 0xf0 ? 3 : b >= 0xe0 ? 2 : b >= 0xc0 ? 1 : 0;
  std::uint32_t cp = extra == 3 ? (b & 0x07) : extra == 2 ? (b & 0x0f) : extra == 1 ? (b & 0x1f) : b;
  if (extra > 0 && i + extra >= s.size()) {
    ++i;
    return b;
  }
  for (int k = 1; k <= extra; ++k) {
    auto c = static_cast<unsigned char>(s[i + k]);
    if ((c & 0xc0) != 0x80) {
      ++i;
      return b;
    }
    cp = (cp << 6) | (c & 0x3f);
  }
  i += 1 + extra;
  return cp;
}

// ASCII letters and digits, plus non-ASCII letters. Latin-1 symbols and the
// General Punctuation block separate tokens.
inline bool is_word_code_point(std::uint32_t cp) {
  if (cp < 0x80) return syntax::is_alpha(static_cast<char>(cp)) || syntax::is_digit(static_cast<char>(cp));
  if (cp <= 0xbf || cp == 0xd7 || cp == 0xf7) return false;
  if (cp >= 0x2000 && cp <= 0x206f) return false;
  return true;
}

inline std::uint32_t lower_code_point(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 32;
  return cp;
}

inline std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    next_code_point(s, i);
    ++n;
  }
  return n;
}

}  // namespace ingest_detail

class Tokenizer {
 public:
  Tokenizer() {
    for (auto w : default_stopwords()) stopwords_.emplace(w);
  }

  explicit Tokenizer(std::set<std::string> stopwords) : stopwords_(std::move(stopwords)) {}

  // One token per line, '#' starts a comment line. Throws IngestError.
  static Tokenizer from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read stopword file " + path.string());
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
      auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      auto end = line.find_last_not_of(" \t\r");
      std::string w = line.substr(start, end - start + 1);
      for (auto& c : w) c = syntax::to_lower(c);
      words.insert(std::move(w));
    }
    return Tokenizer(std::move(words));
  }

  // Lowercase, split on non-alphanumerics, drop tokens shorter than two
  // characters and stopwords. Order and duplicates are preserved.
  std::vector<std::string> tokenize(std::string_view text) const {
    std::vector<std::string> out;
    std::string current;
    std::size_t length = 0;
    auto flush = [&] {
      if (length >= 2 && !stopwords_.count(current)) out.push_back(current);
      current.clear();
      length = 0;
    };
    for (std::size_t i = 0; i < text.size();) {
      std::uint32_t cp = ingest_detail::next_code_point(text, i);
      if (ingest_detail::is_word_code_point(cp)) {
        syntax::append_utf8(current, ingest_detail::lower_code_point(cp));
        ++length;
      } else {
        flush();
      }
    }
    flush();
    return out;
  }

  std::set<std::string> token_set(std::string_view text) const {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
  }

  const std::set<std::string>& stopwords() const { return stopwords_; }

 private:
  std::set<std::string> stopwords_;
};

// ---------------------------------------------------------------------------
// History export

struct HistoryRecord {
  std::string url;
  std::optional<std::string> title;
  std::optional<std::string> description;
  std::int64_t visit_count = 0;
  std::int64_t last_visit_us = 0;

  friend bool operator==(const HistoryRecord&, const HistoryRecord&) = default;
};

struct HistoryBatch {
  std::vector<HistoryRecord> records;
  std::size_t skipped = 0;
};

namespace ingest_detail {

inline std::optional<HistoryRecord> parse_record(const std::string& line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  HistoryRecord rec;

  auto url = j.find("url");
  if (url == j.end() || !url->is_string()) return std::nullopt;
  rec.url = url->get<std::string>();
  try {
    Term::iri(rec.url);
  } catch (const StructureError&) {
    return std::nullopt;
  }

  auto text_field = [&](const char* key, std::optional<std::string>& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return true;
    if (!it->is_string()) return false;
    auto value = it->get<std::string>();
    if (!value.empty()) out = std::move(value);
    return true;
  };
  if (!text_field("title", rec.title) || !text_field("description", rec.description)) return std::nullopt;

  auto int_field = [&](const char* key, std::int64_t& out, bool non_negative) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return true;
    if (!it->is_number_integer()) return false;
    if (it->is_number_unsigned()) {
      auto v = it->get<std::uint64_t>();
      if (v > static_cast<std::uint64_t>(INT64_MAX)) return false;
      out = static_cast<std::int64_t>(v);
    } else {
      out = it->get<std::int64_t>();
    }
    return !(non_negative && out < 0);
  };
  if (!int_field("visit_count", rec.visit_count, true)) return std::nullopt;
  if (!int_field("last_visit_us", rec.last_visit_us, false)) return std::nullopt;
  return rec;
}

inline void keep_longer(std::optional<std::string>& mine, const std::optional<std::string>& theirs) {
  if (theirs && (!mine || theirs->size() > mine->size())) mine = theirs;
}

}  // namespace ingest_detail

// One JSON object per line. Malformed lines are skipped and counted; blank
// lines are ignored. Duplicate urls collapse into the first occurrence.
// Throws IngestError when the stream itself cannot be read.
inline HistoryBatch read_history(std::istream& in) {
  if (!in.good()) throw IngestError("history stream is not readable");
  HistoryBatch batch;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto rec = ingest_detail::parse_record(line);
    if (!rec) {
      ++batch.skipped;
      continue;
    }
    auto [it, inserted] = index.emplace(rec->url, batch.records.size());
    if (inserted) {
      batch.records.push_back(std::move(*rec));
      continue;
    }
    auto& kept = batch.records[it->second];
    kept.visit_count = std::max(kept.visit_count, rec->visit_count);
    kept.last_visit_us = std::max(kept.last_visit_us, rec->last_visit_us);
    ingest_detail::keep_longer(kept.title, rec->title);
    ingest_detail::keep_longer(kept.description, rec->description);
  }
  if (in.bad()) throw IngestError("error while reading history stream");
  return batch;
}

inline HistoryBatch read_history_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open history export " + path.string());
  return read_history(in);
}

// ---------------------------------------------------------------------------
// HTML metadata

struct PageMetadata {
  std::optional<std::string> title;
  std::optional<std::string> description;
};

namespace ingest_detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = syntax::to_lower(c);
  return out;
}

inline bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

// Position of the next "<name" open tag whose name ends at a delimiter.
inline std::size_t find_tag(const std::string& lower, std::string_view name, std::size_t from) {
  std::string needle = "<" + std::string(name);
  while (true) {
    auto at = lower.find(needle, from);
    if (at == std::string::npos) return at;
    std::size_t after = at + needle.size();
    if (after >= lower.size() || is_html_space(lower[after]) || lower[after] == '>' || lower[after] == '/') return at;
    from = at + 1;
  }
}

inline std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::string, std::less<>> kNamed = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i];
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      std::string_view digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        if (hex ? !syntax::is_hex(c) : !syntax::is_digit(c)) ok = false;
      }
      if (ok) {
        for (char c : digits) {
          cp = cp * (hex ? 16 : 10) +
               static_cast<std::uint32_t>(syntax::is_digit(c) ? c - '0' : syntax::to_lower(c) - 'a' + 10);
          if (cp > 0x10ffff) ok = false;
        }
      }
      if (ok && cp > 0) {
        syntax::append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = kNamed.find(ascii_lower(name)); it != kNamed.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    out += s[i];
  }
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_html_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

inline std::string strip_tags(std::string_view s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') {
      in_tag = true;
      out += ' ';
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out += c;
    }
  }
  return out;
}

inline std::optional<std::string> clean_text(std::string_view raw) {
  auto text = collapse_whitespace(decode_entities(strip_tags(raw)));
  if (text.empty()) return std::nullopt;
  return text;
}

// Attributes of the tag starting at `at` (pointing at '<'); names lowercased.
inline std::map<std::string, std::string> read_attributes(const std::string& html, std::size_t at) {
  std::map<std::string, std::string> attrs;
  std::size_t i = at + 1;
  while (i < html.size() && !is_html_space(html[i]) && html[i] != '>' && html[i] != '/') ++i;
  while (i < html.size() && html[i] != '>') {
    if (is_html_space(html[i]) || html[i] == '/') {
      ++i;
      continue;
    }
    std::size_t name_start = i;
    while (i < html.size() && !is_html_space(html[i]) && html[i] != '=' && html[i] != '>' && html[i] != '/') ++i;
    std::string name = ascii_lower(std::string_view(html).substr(name_start, i - name_start));
    while (i < html.size() && is_html_space(html[i])) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && is_html_space(html[i])) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char quote = html[i++];
        auto close = html.find(quote, i);
        if (close == std::string::npos) close = html.size();
        value = html.substr(i, close - i);
        i = close + 1;
      } else {
        std::size_t v = i;
        while (i < html.size() && !is_html_space(html[i]) && html[i] != '>') ++i;
        value = html.substr(v, i - v);
      }
    }
    if (!name.empty()) attrs.emplace(std::move(name), std::move(value));
  }
  return attrs;
}

}  // namespace ingest_detail

// Tolerant scan for the first <title> and the first meta description.
inline PageMetadata extract_metadata(std::string_view html_text) {
  using namespace ingest_detail;
  std::string html(html_text);
  std::string lower = ascii_lower(html);
  PageMetadata meta;

  auto open = find_tag(lower, "title", 0);
  if (open != std::string::npos) {
    auto body = lower.find('>', open);
    if (body != std::string::npos) {
      ++body;
      auto close = lower.find("</title", body);
      if (close == std::string::npos) close = lower.size();
      meta.title = clean_text(std::string_view(html).substr(body, close - body));
    }
  }

  for (auto at = find_tag(lower, "meta", 0); at != std::string::npos; at = find_tag(lower, "meta", at + 1)) {
    auto attrs = read_attributes(html, at);
    auto name = attrs.find("name");
    if (name == attrs.end() || !syntax::iequals(name->second, "description")) continue;
    auto content = attrs.find("content");
    if (content != attrs.end()) meta.description = clean_text(content->second);
    break;
  }
  return meta;
}

// Lowercase hex SHA-256 of the url; names the HTML cache entry.
inline std::string url_digest(std::string_view url) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(url.data(), url.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw IngestError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

inline std::filesystem::path html_cache_path(const std::filesystem::path& cache_dir, std::string_view url) {
  return cache_dir / (url_digest(url) + ".html");
}

// Fills a missing title or description from the cached page, if any.
// Returns true when a cache entry was found.
inline bool enrich_from_cache(HistoryRecord& rec, const std::filesystem::path& cache_dir) {
  auto path = html_cache_path(cache_dir, rec.url);
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto meta = extract_metadata(buffer.str());
  if (!rec.title) rec.title = meta.title;
  if (!rec.description) rec.description = meta.description;
  return true;
}

// ---------------------------------------------------------------------------
// Classification

struct Lexicon {
  Term class_iri;
  std::set<std::string> keywords;
};

// Collects ex:keyword values per class. Keywords are lowercased; values
// shorter than two characters are ignored.
inline std::vector<Lexicon> lexicons_from_ontology(const Graph& ontology) {
  std::map<Term, std::set<std::string>> by_class;
  for (const auto& t : ontology.match(kAny, vocab::keyword, kAny)) {
    if (!t.subject.is_iri() || !t.object.is_literal()) continue;
    std::string word = ingest_detail::ascii_lower(t.object.value());
    if (ingest_detail::code_point_count(word) < 2) continue;
    by_class[t.subject].insert(std::move(word));
  }
  std::vector<Lexicon> out;
  for (auto& [cls, words] : by_class) out.push_back({cls, std::move(words)});
  return out;
}

struct Classification {
  std::optional<Term> class_iri;
  // Distinct lexicon keywords hit by the winning class.
  std::size_t score = 0;
  bool ambiguous = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

// Deepest class that is a superclass (or equal) of every class in `tied`;
// owl:Thing when they share none.
inline Term nearest_common_superclass(const Graph& ontology, const std::set<Term>& tied) {
  std::optional<std::set<Term>> common;
  for (const auto& c : tied) {
    auto up = superclasses(ontology, c, QueryMode::kAll);
    up.insert(c);
    if (!common) {
      common = std::move(up);
    } else {
      std::set<Term> both;
      std::set_intersection(common->begin(), common->end(), up.begin(), up.end(), std::inserter(both, both.end()));
      common = std::move(both);
    }
  }
  std::optional<Term> best;
  std::size_t best_depth = 0;
  for (const auto& c : common.value_or(std::set<Term>{})) {
    if (c == vocab::thing) continue;
    std::size_t depth = superclasses(ontology, c, QueryMode::kAll).size();
    if (!best || depth > best_depth) {
      best = c;
      best_depth = depth;
    }
  }
  return best.value_or(vocab::thing);
}

inline Classification classify(const HistoryRecord& rec, const std::vector<Lexicon>& lexicons, const Graph& ontology,
                               const Tokenizer& tokenizer) {
  std::string text = rec.title.value_or("") + " " + rec.description.value_or("");
  auto tokens = tokenizer.token_set(text);

  std::map<Term, std::size_t> scores;
  for (const auto& lex : lexicons) {
    std::size_t score = 0;
    for (const auto& k : lex.keywords) score += tokens.count(k);
    auto& slot = scores[lex.class_iri];
    slot = std::max(slot, score);
  }
  std::size_t best = 0;
  for (const auto& [cls, score] : scores) best = std::max(best, score);
  if (best == 0) return {};

  std::set<Term> tied;
  for (const auto& [cls, score] : scores) {
    if (score == best) tied.insert(cls);
  }
  if (tied.size() == 1) return {*tied.begin(), best, false};
  return {nearest_common_superclass(ontology, tied), best, true};
}

// Triples describing one visited page; the page url is the individual IRI.
inline std::vector<Triple> page_triples(const HistoryRecord& rec, const Classification& cls) {
  Term page = Term::iri(rec.url);
  GraphBuilder b;
  b.insert(page, vocab::type, vocab::web_page);
  if (cls.class_iri) b.insert(page, vocab::type, *cls.class_iri);
  if (rec.title) b.insert(page, vocab::label, Term::literal(*rec.title));
  if (rec.description) b.insert(page, vocab::comment, Term::literal(*rec.description));
  b.insert(page, vocab::visit_count, Term::integer(rec.visit_count));
  b.insert(page, vocab::last_visit, Term::integer(rec.last_visit_us));
  return b.freeze().triples();
}

}  // namespace semsearch
