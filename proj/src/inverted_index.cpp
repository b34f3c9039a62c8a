#include "lexann/inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lexann/binio.hpp"
#include "lexann/errors.hpp"

namespace lexann {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'X', 'A', 'N', 'N', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

// Query bags are unordered; scoring iterates terms in lexicographic order
// so that floating-point accumulation is reproducible.
std::vector<std::pair<std::string, std::uint32_t>> sorted_query(const TermBag& query) {
  std::vector<std::pair<std::string, std::uint32_t>> q(query.begin(), query.end());
  std::sort(q.begin(), q.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return q;
}

}  // namespace

void InvertedIndex::add_document(const TermDocument& doc) {
  if (doc_len_.count(doc.doc_id) != 0) {
    throw DuplicateDocIdError(doc.doc_id);
  }
  std::uint64_t total = 0;
  for (const auto& [term, freq] : doc.terms) {
    if (freq == 0) {
      throw std::invalid_argument("term frequency must be >= 1 (term '" + term +
                                  "', doc " + std::to_string(doc.doc_id) + ")");
    }
    total += freq;
  }
  for (const auto& [term, freq] : doc.terms) {
    auto& list = postings_[term];
    Posting p{doc.doc_id, freq};
    if (list.empty() || list.back().doc_id < doc.doc_id) {
      list.push_back(p);
    } else {
      auto it = std::lower_bound(
          list.begin(), list.end(), doc.doc_id,
          [](const Posting& a, DocId id) { return a.doc_id < id; });
      list.insert(it, p);
    }
  }
  doc_len_.emplace(doc.doc_id, total);
}

std::uint32_t InvertedIndex::doc_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

std::uint64_t InvertedIndex::doc_length(DocId doc_id) const {
  auto it = doc_len_.find(doc_id);
  if (it == doc_len_.end()) {
    throw std::out_of_range("unknown doc_id " + std::to_string(doc_id));
  }
  return it->second;
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<std::string> InvertedIndex::terms() const {
  std::vector<std::string> out;
  out.reserve(postings_.size());
  for (const auto& [term, _] : postings_) out.push_back(term);
  std::sort(out.begin(), out.end());
  return out;
}

double InvertedIndex::idf(const std::string& term) const {
  const double n = static_cast<double>(num_documents());
  const double df = static_cast<double>(doc_frequency(term));
  return 1.0 + std::log(n / (df + 1.0));
}

double InvertedIndex::tf_idf_score(const TermBag& query, DocId doc_id) const {
  const std::uint64_t len = doc_length(doc_id);  // throws on unknown doc
  double sum = 0.0;
  for (const auto& [term, qf] : sorted_query(query)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& list = it->second;
    auto pit = std::lower_bound(
        list.begin(), list.end(), doc_id,
        [](const Posting& a, DocId id) { return a.doc_id < id; });
    if (pit == list.end() || pit->doc_id != doc_id) continue;
    const double w = static_cast<double>(qf) * (idf(term) * idf(term));
    sum += w * std::sqrt(static_cast<double>(pit->freq));
  }
  if (sum == 0.0) return 0.0;  // no matching terms; avoids 0 * inf for empty docs
  return sum * (1.0 / std::sqrt(static_cast<double>(len)));
}

std::vector<ScoredDoc> InvertedIndex::search(const TermBag& query, std::size_t depth,
                                             double df_cutoff) const {
  if (depth < 1) {
    throw std::invalid_argument("search depth must be >= 1");
  }
  if (!(df_cutoff > 0.0 && df_cutoff <= 1.0)) {
    throw std::invalid_argument("df_cutoff must be in (0, 1]");
  }
  const double n = static_cast<double>(num_documents());

  std::unordered_map<DocId, double> acc;
  for (const auto& [term, qf] : sorted_query(query)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    if (df > df_cutoff * n) continue;  // highly-frequent term, dropped
    const double w = static_cast<double>(qf) * (idf(term) * idf(term));
    for (const Posting& p : it->second) {
      acc[p.doc_id] += w * std::sqrt(static_cast<double>(p.freq));
    }
  }

  std::vector<ScoredDoc> out;
  out.reserve(acc.size());
  for (const auto& [doc_id, sum] : acc) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(doc_len_.at(doc_id)));
    out.push_back(ScoredDoc{doc_id, sum * norm});
  }
  std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (out.size() > depth) out.resize(depth);
  return out;
}

void InvertedIndex::save(std::ostream& out) const {
  binio::Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));

  nlohmann::json header = {
      {"version", kFormatVersion},
      {"doc_count", num_documents()},
      {"term_count", num_terms()},
      {"metadata", metadata},
  };
  w.str(header.dump());

  // Terms in lexicographic order; postings already ascending by doc_id.
  for (const auto& term : terms()) {
    const auto& list = postings_.at(term);
    w.str(term);
    w.u64(list.size());
    for (const Posting& p : list) {
      w.u32(p.doc_id);
      w.u32(p.freq);
    }
  }

  std::vector<DocId> ids;
  ids.reserve(doc_len_.size());
  for (const auto& [id, _] : doc_len_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (DocId id : ids) {
    w.u32(id);
    w.u64(doc_len_.at(id));
  }
}

void InvertedIndex::persist(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  save(out);
  out.flush();
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

InvertedIndex InvertedIndex::load(std::istream& in) {
  binio::Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad magic: not a lexann index file", 0);
  }
  const std::size_t header_at = r.offset();
  const std::string header_text = r.str("header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON header: ") + e.what(), header_at);
  }
  if (!header.contains("version") || header["version"].get<std::uint32_t>() != kFormatVersion) {
    throw ParseError("unsupported index format version", header_at);
  }

  const auto doc_count = header.at("doc_count").get<std::uint64_t>();
  const auto term_count = header.at("term_count").get<std::uint64_t>();

  InvertedIndex idx;
  idx.metadata = header.value("metadata", nlohmann::json::object());

  std::unordered_map<DocId, std::uint64_t> freq_sums;
  for (std::uint64_t t = 0; t < term_count; ++t) {
    const std::size_t term_at = r.offset();
    std::string term = r.str("term");
    const std::uint64_t count = r.u64("postings count");
    if (count == 0) {
      throw ParseError("term '" + term + "' has an empty postings list", term_at);
    }
    std::vector<Posting> list;
    list.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      Posting p;
      p.doc_id = r.u32("posting doc_id");
      p.freq = r.u32("posting freq");
      if (p.freq == 0) {
        throw ParseError("zero term frequency in postings", r.offset() - 4);
      }
      if (!list.empty() && list.back().doc_id >= p.doc_id) {
        throw ParseError("postings not ascending by doc_id", r.offset() - 8);
      }
      freq_sums[p.doc_id] += p.freq;
      list.push_back(p);
    }
    idx.postings_.emplace(std::move(term), std::move(list));
  }

  for (std::uint64_t i = 0; i < doc_count; ++i) {
    const std::size_t at = r.offset();
    const DocId id = r.u32("doc id");
    const std::uint64_t len = r.u64("doc length");
    if (idx.doc_len_.count(id) != 0) {
      throw ParseError("duplicate doc id in length table", at);
    }
    auto it = freq_sums.find(id);
    const std::uint64_t sum = it == freq_sums.end() ? 0 : it->second;
    if (sum != len) {
      throw ParseError("doc length does not match postings for doc " + std::to_string(id), at);
    }
    idx.doc_len_.emplace(id, len);
  }
  if (freq_sums.size() > idx.doc_len_.size()) {
    throw ParseError("postings reference docs missing from the length table", r.offset());
  }
  return idx;
}

InvertedIndex InvertedIndex::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }
  return load(in);
}

std::uint64_t InvertedIndex::index_size_bytes() const {
  binio::CountingBuf buf;
  std::ostream out(&buf);
  save(out);
  return buf.count();
}

}  // namespace lexann
