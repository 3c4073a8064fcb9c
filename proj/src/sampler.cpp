#include "ibrep/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ibrep {

void SamplerConfig::check() const {
  if (!(top_p > 0.0 && top_p <= 1.0)) throw std::invalid_argument("top_p not in (0,1]");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (!(mask_value < 0.0)) throw std::invalid_argument("mask_value must be negative");
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 substream_rng(std::uint64_t seed, int stream) {
  return std::mt19937_64(splitmix64(seed + 1 + std::uint64_t(stream)));
}

namespace {
// Uniform double in [0,1) built directly from generator bits so results do
// not depend on the standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

std::vector<int> nucleus_slots(const std::vector<double>& scores,
                               const std::vector<bool>& valid,
                               const SamplerConfig& cfg,
                               std::vector<double>* probs_out) {
  cfg.check();
  const int n = int(scores.size());
  if (int(valid.size()) != n)
    throw std::invalid_argument("masked_step: mask/score size mismatch");
  bool any_valid = false;
  for (bool v : valid) any_valid |= v;
  if (!any_valid) throw EmptyValidSet("no valid token at this step");

  std::vector<double> logits(n);
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    logits[i] = (valid[i] ? scores[i] : cfg.mask_value) / cfg.temperature;
    hi = std::max(hi, logits[i]);
  }
  std::vector<double> prob(n);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    prob[i] = std::exp(logits[i] - hi);
    total += prob[i];
  }
  for (double& p : prob) p /= total;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (prob[a] != prob[b]) return prob[a] > prob[b];
    return a < b;
  });

  // Smallest probability-sorted prefix whose mass reaches top_p, keeping
  // the slot that crosses the boundary. Zero-probability slots can never
  // enter: every valid slot has positive probability.
  std::vector<int> kept;
  double kept_mass = 0;
  for (int idx : order) {
    if (prob[idx] <= 0.0) break;
    kept.push_back(idx);
    kept_mass += prob[idx];
    if (kept_mass >= cfg.top_p) break;
  }
  if (kept.empty()) throw EmptyValidSet("all valid tokens underflowed");
  if (probs_out) *probs_out = std::move(prob);
  return kept;
}

int masked_step(const std::vector<double>& scores, const std::vector<bool>& valid,
                const SamplerConfig& cfg, std::mt19937_64& rng) {
  std::vector<double> prob;
  const std::vector<int> kept = nucleus_slots(scores, valid, cfg, &prob);

  double kept_mass = 0;
  for (int idx : kept) kept_mass += prob[idx];
  const double u = uniform01(rng) * kept_mass;
  double cum = 0;
  for (int idx : kept) {
    cum += prob[idx];
    if (u < cum) return idx;
  }
  return kept.back();
}

void NGramScorer::fit(const TokenSequence& seq) {
  const int kind = int(seq.kind);
  const int ctx_len = order_;
  for (size_t t = 0; t < seq.tokens.size(); ++t) {
    const size_t lo = t >= size_t(ctx_len) ? t - ctx_len : 0;
    Context ctx(seq.tokens.begin() + lo, seq.tokens.begin() + t);
    ++counts_[{kind, ctx}][seq.tokens[t]];
  }
}

void NGramScorer::score(SeqKind kind, const std::vector<int>& prefix,
                        const Vocab& vocab, std::vector<double>& out) const {
  const int ctx_len = order_;
  const size_t lo = prefix.size() >= size_t(ctx_len) ? prefix.size() - ctx_len : 0;
  Context ctx(prefix.begin() + lo, prefix.end());
  const auto it = counts_.find({int(kind), ctx});

  out.assign(vocab.size(), 0.0);
  if (it == counts_.end()) return;  // unseen context scores uniformly
  for (int slot = 0; slot < vocab.size(); ++slot) {
    const auto cit = it->second.find(vocab.token_at_slot(slot));
    const double count = cit == it->second.end() ? 0.0 : double(cit->second);
    out[slot] = std::log(count + alpha_);
  }
}

NGramScorer ngram_fit(const std::vector<TokenSequence>& corpus, int order) {
  if (corpus.empty()) throw std::invalid_argument("ngram_fit: empty corpus");
  NGramScorer scorer(order);
  for (const TokenSequence& seq : corpus) scorer.fit(seq);
  return scorer;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::DeadEnd: return "dead_end";
    case Outcome::Truncated: return "truncated";
  }
  return "?";
}

namespace {

Outcome run_sequence(const TokenScorer& scorer, const Vocab& vocab,
                     const SamplerConfig& cfg, std::mt19937_64& rng,
                     TokenSequence& seq) {
  seq.kind = vocab.kind;
  seq.tokens.clear();
  MaskState st(vocab);
  std::vector<double> scores;
  std::vector<bool> all_valid(vocab.size(), true);

  for (int t = 0; t < cfg.max_tokens; ++t) {
    const std::vector<bool> mask = cfg.mask_enabled ? st.valid_slots() : all_valid;
    scorer.score(vocab.kind, seq.tokens, vocab, scores);
    int slot;
    try {
      slot = masked_step(scores, mask, cfg, rng);
    } catch (const EmptyValidSet&) {
      return Outcome::DeadEnd;
    }
    const int token = vocab.token_at_slot(slot);
    seq.tokens.push_back(token);
    if (cfg.mask_enabled) st.advance(token);
    if (token == kEos) return Outcome::Completed;
  }
  return Outcome::Truncated;
}

// Sorts and dedups edges before faces point at them, so the face
// vocabulary matches the canonical edge list.
std::vector<std::vector<int>> canonical_edges(std::vector<std::vector<int>> edges) {
  for (auto& e : edges) std::sort(e.begin(), e.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

GenerationResult generate(const TokenScorer& scorer, int bits,
                          const SamplerConfig& cfg) {
  cfg.check();
  GenerationResult res;
  const int levels = 1 << bits;

  auto rng_v = substream_rng(cfg.seed, 0);
  res.outcome = run_sequence(scorer, Vocab{SeqKind::Vertex, levels}, cfg, rng_v,
                             res.vertex_seq);
  if (res.outcome != Outcome::Completed) {
    res.failed_stage = SeqKind::Vertex;
    return res;
  }

  std::vector<BinTriple> vertices;
  std::vector<std::vector<int>> edges, faces;
  try {
    vertices = unflatten_vertices(res.vertex_seq.tokens, levels);
  } catch (const GrammarViolation& e) {
    res.error = e.what();
    return res;
  }

  auto rng_e = substream_rng(cfg.seed, 1);
  res.outcome = run_sequence(scorer, Vocab{SeqKind::Edge, int(vertices.size())},
                             cfg, rng_e, res.edge_seq);
  if (res.outcome != Outcome::Completed) {
    res.failed_stage = SeqKind::Edge;
    return res;
  }
  try {
    edges = canonical_edges(
        unflatten_edges(res.edge_seq.tokens, int(vertices.size())));
  } catch (const GrammarViolation& e) {
    res.error = e.what();
    return res;
  }

  auto rng_f = substream_rng(cfg.seed, 2);
  res.outcome = run_sequence(scorer, Vocab{SeqKind::Face, int(edges.size())},
                             cfg, rng_f, res.face_seq);
  if (res.outcome != Outcome::Completed) {
    res.failed_stage = SeqKind::Face;
    return res;
  }
  try {
    faces = unflatten_faces(res.face_seq.tokens, int(edges.size()));
    IndexedBRep raw{std::move(vertices), std::move(edges), std::move(faces)};
    IndexedBRep canon = canonicalize(raw);
    res.structurally_valid = structural_check(canon).empty();
    res.assembled = std::move(canon);
  } catch (const std::exception& e) {
    res.error = e.what();
    res.structurally_valid = false;
  }
  return res;
}

}  // namespace ibrep
