#pragma once

#include "ibrep/tokens.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace ibrep {

/// Scores the next token given the prefix of the current sequence. One
/// finite score per vocabulary slot (see Vocab for the slot layout).
/// Implementations must be deterministic in (kind, prefix) and safe for
/// concurrent read-only use.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual void score(SeqKind kind, const std::vector<int>& prefix,
                     const Vocab& vocab, std::vector<double>& out) const = 0;
};

/// Scores every token equally.
class UniformScorer : public TokenScorer {
 public:
  void score(SeqKind, const std::vector<int>&, const Vocab& vocab,
             std::vector<double>& out) const override {
    out.assign(vocab.size(), 0.0);
  }
};

/// Additive-smoothed n-gram counts per sequence kind. An order-k scorer
/// conditions on the k most recent tokens (shorter prefixes near the start
/// key their own contexts). Scores are log(count + alpha), so unseen
/// contexts degrade to uniform while a small alpha keeps observed
/// continuations dominant over the smoothing floor.
class NGramScorer : public TokenScorer {
 public:
  explicit NGramScorer(int order, double alpha = 0.01)
      : order_(order), alpha_(alpha) {
    if (order < 1) throw std::invalid_argument("ngram order must be >= 1");
    if (alpha <= 0) throw std::invalid_argument("ngram alpha must be > 0");
  }

  void fit(const TokenSequence& seq);
  void score(SeqKind kind, const std::vector<int>& prefix, const Vocab& vocab,
             std::vector<double>& out) const override;

  int order() const { return order_; }

 private:
  using Context = std::vector<int>;
  int order_;
  double alpha_;
  std::map<std::pair<int, Context>, std::map<int, std::int64_t>> counts_;
};

/// Builds an n-gram scorer from flattened sequences of any mix of kinds.
NGramScorer ngram_fit(const std::vector<TokenSequence>& corpus, int order);

struct SamplerConfig {
  double top_p = 1.0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  double mask_value = -1e9;
  int max_tokens = 256;      // per sequence, EOS included
  bool mask_enabled = true;  // disable only to measure the unmasked baseline

  void check() const;
};

struct EmptyValidSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// SplitMix64 step; the substream for sequence kind k of a generation
/// seeded with s uses mt19937_64(splitmix64(s + 1 + k)) with k = 0, 1, 2
/// for vertices, edges, faces.
std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 substream_rng(std::uint64_t seed, int stream);

/// The nucleus: slots sorted by masked softmax probability (descending,
/// index-stable), truncated to the smallest prefix whose mass reaches
/// top_p, boundary slot included. Throws EmptyValidSet when no slot is
/// valid.
std::vector<int> nucleus_slots(const std::vector<double>& scores,
                               const std::vector<bool>& valid,
                               const SamplerConfig& cfg,
                               std::vector<double>* probs_out = nullptr);

/// One masked nucleus-sampling step over vocabulary slots. Invalid slots
/// are pushed to mask_value, the remainder is softmaxed at the configured
/// temperature, sorted, truncated to the smallest prefix reaching top_p
/// (inclusive), renormalized, and sampled. The returned slot is always
/// valid. Throws EmptyValidSet when no slot is valid.
int masked_step(const std::vector<double>& scores, const std::vector<bool>& valid,
                const SamplerConfig& cfg, std::mt19937_64& rng);

enum class Outcome { Completed, DeadEnd, Truncated };

const char* outcome_name(Outcome o);

struct GenerationResult {
  TokenSequence vertex_seq, edge_seq, face_seq;
  Outcome outcome = Outcome::Completed;
  SeqKind failed_stage = SeqKind::Vertex;  // stage that dead-ended/truncated
  std::optional<IndexedBRep> assembled;    // canonical triple when it builds
  bool structurally_valid = false;
  std::string error;
};

/// Samples the three sequences in order (vertices, then edges over the
/// decoded vertex vocabulary, then faces over the canonical edge
/// vocabulary) and assembles the result. `bits` fixes the coordinate
/// vocabulary to 2^bits values.
GenerationResult generate(const TokenScorer& scorer, int bits,
                          const SamplerConfig& cfg);

}  // namespace ibrep
