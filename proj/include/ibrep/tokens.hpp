#pragma once

#include "ibrep/indexed_brep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ibrep {

// Special tokens use negative sentinels in sequences and files.
constexpr int kEos = -1;
constexpr int kSep = -2;  // <NEW_EDGE> or <NEW_FACE> depending on kind

enum class SeqKind { Vertex, Edge, Face };

const char* seq_kind_name(SeqKind k);

/// Vocabulary of one sequence kind. `base` counts the ordinary tokens:
/// 2^bits coordinate values, |V| vertex indices, or |E| edge indices.
/// Slot layout for scoring: [0, base) ordinary, then the separator
/// (edge/face kinds only), then EOS last.
struct Vocab {
  SeqKind kind = SeqKind::Vertex;
  int base = 0;

  int size() const { return base + (kind == SeqKind::Vertex ? 1 : 2); }
  int token_at_slot(int slot) const;
  int slot_of(int token) const;
};

struct TokenSequence {
  SeqKind kind = SeqKind::Vertex;
  std::vector<int> tokens;

  bool terminated() const { return !tokens.empty() && tokens.back() == kEos; }
};

struct GrammarViolation : std::runtime_error {
  int step;
  std::string rule;
  GrammarViolation(int step_, std::string rule_)
      : std::runtime_error("grammar violation at step " + std::to_string(step_) +
                           ": " + rule_),
        step(step_),
        rule(std::move(rule_)) {}
};

/// Incremental recognizer state for one sequence. Feeding tokens with
/// advance() keeps the registers consistent with the prefix; check()
/// reports the violated rule for a candidate next token, or nullptr if
/// the token is currently valid.
class MaskState {
 public:
  explicit MaskState(Vocab vocab);

  const Vocab& vocab() const { return vocab_; }
  int step() const { return t_; }
  bool finished() const { return finished_; }

  /// Rule id violated by `token` as the next token, or nullptr when valid.
  const char* check(int token) const;
  bool is_valid(int token) const { return check(token) == nullptr; }

  /// Valid-token mask over vocabulary slots.
  std::vector<bool> valid_slots() const;
  bool dead_end() const;

  /// Throws GrammarViolation when the token is invalid.
  void advance(int token);

 private:
  Vocab vocab_;
  int t_ = 0;
  bool finished_ = false;
  bool prev_was_sep_ = false;
  int last_token_ = -1;
  int group_count_ = 0;                  // tokens in the current edge/face
  std::optional<int> prev_group_first_;  // first token of the previous group
  std::optional<BinTriple> prev_triplet_;
  int cur_coords_[3] = {0, 0, 0};
  std::vector<int> use_count_;  // face kind: per edge index, across all faces
};

/// The exact set of tokens the grammar permits next, as token values.
inline std::vector<int> valid_next(const MaskState& state) {
  std::vector<int> out;
  for (int slot = 0; slot < state.vocab().size(); ++slot) {
    const int tok = state.vocab().token_at_slot(slot);
    if (state.is_valid(tok)) out.push_back(tok);
  }
  return out;
}

TokenSequence flatten_vertices(const IndexedBRep& b);
TokenSequence flatten_edges(const IndexedBRep& b);
TokenSequence flatten_faces(const IndexedBRep& b);

struct ReplayResult {
  bool ok = true;
  int step = -1;
  std::string rule;
};

/// Runs the recognizer over the whole sequence, EOS included, with the
/// given ordinary-token count. The sequence must terminate exactly once.
ReplayResult replay_validate(SeqKind kind, const std::vector<int>& tokens, int base);

/// Inverse of the flatten operations. The bare sequence [EOS] decodes to an
/// empty component; everything else must replay cleanly or a
/// GrammarViolation pinpoints the first offending step.
std::vector<BinTriple> unflatten_vertices(const std::vector<int>& tokens, int levels);
std::vector<std::vector<int>> unflatten_edges(const std::vector<int>& tokens,
                                              int num_vertices);
std::vector<std::vector<int>> unflatten_faces(const std::vector<int>& tokens,
                                              int num_edges);

}  // namespace ibrep
