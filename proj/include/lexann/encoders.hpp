#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexann/inverted_index.hpp"

namespace lexann {

using DenseVector = std::vector<float>;

/// Fake-words encoding: feature i of a unit vector becomes a synthetic term
/// repeated floor(q * |w_i|) times, so term frequency is directly
/// proportional to the feature value.
struct FakeWordsConfig {
  std::uint32_t q = 30;  // quantization factor, must be > 1
};

/// Lexical LSH encoding: features are rounded, tagged with their index,
/// optionally aggregated into n-grams, and MinHash-compressed into
/// per-bucket signature terms.
struct LexicalLshConfig {
  std::uint32_t ngram_len = 1;    // n: 1 = raw tokens
  std::uint32_t num_hashes = 1;   // h: independent hash functions
  std::uint32_t num_buckets = 1;  // b: buckets per hash function
  std::uint32_t decimals = 1;     // quantization places
};

/// Scales v to unit Euclidean length. Throws on the zero vector.
DenseVector normalize(const DenseVector& v);

/// Encodes a unit vector as fake words: term "f<i>p" (w_i > 0) or "f<i>n"
/// (w_i < 0) with frequency floor(q * |w_i|); features whose count floors
/// to 0 emit nothing. Signed features are split per sign so that matching
/// opposite-sign features never share a term. Throws unless ||v|| is 1
/// within 1e-6 (the inner-product/cosine equivalence needs unit inputs).
TermBag encode_fake_words(const DenseVector& v, const FakeWordsConfig& cfg);

/// Rounds each feature to `decimals` places (half away from zero) and tags
/// it with its 1-based index: (0.12, 0.43, 0.74) -> "1_0.1" "2_0.4" "3_0.7".
/// "-0.0" is normalized to "0.0". Output order follows feature order.
std::vector<std::string> quantize_and_tag(const DenseVector& v, std::uint32_t decimals = 1);

/// Overlapping n-grams joined by '|'. n = 1 returns the input unchanged; a
/// list shorter than n yields a single gram of all tokens (a vector must
/// never encode to the empty set). Empty input stays empty.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::uint32_t n);

/// MinHash signature: for each hash function j in [0, h) and bucket
/// r in [0, b), the minimum hash64(j, token) among tokens landing in bucket
/// r becomes the term "mh_<j>_<r>_<min-hex>"; empty buckets emit nothing.
/// Two vectors agree on a slot only if their bucket minima coincide.
/// Deterministic for fixed (tokens, cfg). Throws on an empty token list.
TermBag minhash_signature(const std::vector<std::string>& tokens, const LexicalLshConfig& cfg);

/// The full lexical-LSH pipeline:
/// minhash_signature(ngrams(quantize_and_tag(v, decimals), n), cfg).
TermBag encode_lexical_lsh(const DenseVector& v, const LexicalLshConfig& cfg);

}  // namespace lexann
