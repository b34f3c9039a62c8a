#include "lexann/encoders.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "lexann/hash64.hpp"

namespace lexann {

namespace {

void require_finite(const DenseVector& v) {
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("vector component is not finite");
    }
  }
}

void validate(const LexicalLshConfig& cfg) {
  if (cfg.ngram_len < 1 || cfg.num_hashes < 1 || cfg.num_buckets < 1 || cfg.decimals < 1) {
    throw std::invalid_argument("lexical-lsh parameters must all be >= 1");
  }
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf, 16);
}

}  // namespace

DenseVector normalize(const DenseVector& v) {
  require_finite(v);
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  if (sq == 0.0) {
    throw std::invalid_argument("cannot normalize the zero vector");
  }
  const double inv = 1.0 / std::sqrt(sq);
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) * inv);
  }
  return out;
}

TermBag encode_fake_words(const DenseVector& v, const FakeWordsConfig& cfg) {
  if (cfg.q <= 1) {
    throw std::invalid_argument("fake-words quantization factor q must be > 1");
  }
  require_finite(v);
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
    throw std::invalid_argument("fake-words input must be unit-normalized");
  }

  TermBag bag;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(static_cast<double>(v[i]));
    const auto count = static_cast<std::uint32_t>(std::floor(cfg.q * mag));
    if (count == 0) continue;
    std::string term = "f" + std::to_string(i) + (v[i] > 0.0f ? "p" : "n");
    bag.emplace(std::move(term), count);
  }
  return bag;
}

std::vector<std::string> quantize_and_tag(const DenseVector& v, std::uint32_t decimals) {
  if (decimals < 1) {
    throw std::invalid_argument("decimals must be >= 1");
  }
  require_finite(v);
  std::int64_t pow10 = 1;
  for (std::uint32_t i = 0; i < decimals; ++i) pow10 *= 10;

  std::vector<std::string> tokens;
  tokens.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    // llround rounds halfway cases away from zero, matching the documented
    // quantization mode for signed features.
    const long long scaled = std::llround(static_cast<double>(v[i]) * pow10);
    const bool negative = scaled < 0;
    const unsigned long long mag = negative ? -static_cast<unsigned long long>(scaled)
                                            : static_cast<unsigned long long>(scaled);
    std::string text;
    if (negative && mag != 0) text += '-';
    text += std::to_string(mag / pow10);
    text += '.';
    std::string frac = std::to_string(mag % pow10);
    text.append(decimals - frac.size(), '0');
    text += frac;
    tokens.push_back(std::to_string(i + 1) + "_" + text);
  }
  return tokens;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::uint32_t n) {
  if (n < 1) {
    throw std::invalid_argument("n-gram length must be >= 1");
  }
  if (n == 1 || tokens.empty()) return tokens;

  std::vector<std::string> out;
  auto join = [&tokens](std::size_t begin, std::size_t end) {
    std::string gram = tokens[begin];
    for (std::size_t i = begin + 1; i < end; ++i) {
      gram += '|';
      gram += tokens[i];
    }
    return gram;
  };

  if (tokens.size() < n) {
    out.push_back(join(0, tokens.size()));
    return out;
  }
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    out.push_back(join(i, i + n));
  }
  return out;
}

TermBag minhash_signature(const std::vector<std::string>& tokens,
                          const LexicalLshConfig& cfg) {
  validate(cfg);
  if (tokens.empty()) {
    throw std::invalid_argument("minhash requires a nonempty token list");
  }

  TermBag bag;
  std::vector<std::uint64_t> minima(cfg.num_buckets);
  std::vector<char> occupied(cfg.num_buckets);
  for (std::uint32_t j = 0; j < cfg.num_hashes; ++j) {
    std::fill(occupied.begin(), occupied.end(), 0);
    for (const std::string& tok : tokens) {
      const std::uint64_t h = hash64(j, tok);
      const std::uint32_t r = hash_bucket(h, cfg.num_buckets);
      if (!occupied[r] || h < minima[r]) {
        minima[r] = h;
        occupied[r] = 1;
      }
    }
    for (std::uint32_t r = 0; r < cfg.num_buckets; ++r) {
      if (!occupied[r]) continue;
      bag["mh_" + std::to_string(j) + "_" + std::to_string(r) + "_" + hex16(minima[r])] += 1;
    }
  }
  return bag;
}

TermBag encode_lexical_lsh(const DenseVector& v, const LexicalLshConfig& cfg) {
  validate(cfg);
  return minhash_signature(ngrams(quantize_and_tag(v, cfg.decimals), cfg.ngram_len), cfg);
}

}  // namespace lexann
