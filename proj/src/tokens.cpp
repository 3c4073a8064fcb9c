#include "ibrep/tokens.hpp"

namespace ibrep {

const char* seq_kind_name(SeqKind k) {
  switch (k) {
    case SeqKind::Vertex: return "vertex";
    case SeqKind::Edge: return "edge";
    case SeqKind::Face: return "face";
  }
  return "?";
}

int Vocab::token_at_slot(int slot) const {
  if (slot < 0 || slot >= size()) throw std::out_of_range("bad vocab slot");
  if (slot < base) return slot;
  if (kind == SeqKind::Vertex) return kEos;
  return slot == base ? kSep : kEos;
}

int Vocab::slot_of(int token) const {
  if (token >= 0 && token < base) return token;
  if (token == kEos) return size() - 1;
  if (token == kSep && kind != SeqKind::Vertex) return base;
  throw std::out_of_range("token not in vocabulary");
}

MaskState::MaskState(Vocab vocab) : vocab_(vocab) {
  if (vocab_.base < 0) throw std::invalid_argument("negative vocab base");
  if (vocab_.kind == SeqKind::Face) use_count_.assign(vocab_.base, 0);
}

const char* MaskState::check(int token) const {
  if (finished_) return "sequence already terminated";
  const bool ordinary = token >= 0 && token < vocab_.base;
  const bool is_eos = token == kEos;
  const bool is_sep = token == kSep && vocab_.kind != SeqKind::Vertex;
  if (!ordinary && !is_eos && !is_sep) return "token outside vocabulary";

  if (vocab_.kind == SeqKind::Vertex) {
    if (is_eos) {
      if (t_ == 0 || t_ % 3 != 0) return "EOS only after an x-coordinate";
      return nullptr;
    }
    if (!prev_triplet_) return nullptr;  // first triplet is unconstrained
    const BinTriple& p = *prev_triplet_;
    switch (t_ % 3) {
      case 0:
        if (token < p[0]) return "z must be >= previous z";
        break;
      case 1:
        if (cur_coords_[0] == p[0] && token < p[1])
          return "y must be >= previous y when z repeats";
        break;
      case 2:
        if (cur_coords_[0] == p[0] && cur_coords_[1] == p[1] && token <= p[2])
          return "x must be > previous x when z and y repeat";
        break;
    }
    return nullptr;
  }

  // Edge and face sequences share the separator discipline.
  if (is_eos || is_sep) {
    if (t_ == 0) return "specials cannot start a sequence";
    if (prev_was_sep_) return "specials cannot follow a separator";
    if (vocab_.kind == SeqKind::Edge) {
      if (group_count_ != 2 && group_count_ != 3)
        return "separator/EOS only after two or three edge tokens";
    } else {
      if (group_count_ < 2) return "separator/EOS only after two or more face tokens";
    }
    return nullptr;
  }

  if (vocab_.kind == SeqKind::Edge && group_count_ == 3)
    return "an edge holds at most three vertex indices";
  if (vocab_.kind == SeqKind::Face && use_count_[token] >= 2)
    return "an edge index can be used at most twice";

  if (group_count_ == 0) {
    if (prev_group_first_ && token < *prev_group_first_)
      return vocab_.kind == SeqKind::Edge
                 ? "first index must be >= first index of previous edge"
                 : "first index must be >= first index of previous face";
  } else if (token <= last_token_) {
    return "indices within a group must be strictly ascending";
  }
  return nullptr;
}

std::vector<bool> MaskState::valid_slots() const {
  std::vector<bool> mask(vocab_.size(), false);
  for (int slot = 0; slot < vocab_.size(); ++slot)
    mask[slot] = is_valid(vocab_.token_at_slot(slot));
  return mask;
}

bool MaskState::dead_end() const {
  for (int slot = 0; slot < vocab_.size(); ++slot)
    if (is_valid(vocab_.token_at_slot(slot))) return false;
  return true;
}

void MaskState::advance(int token) {
  if (const char* rule = check(token)) throw GrammarViolation(t_, rule);

  if (vocab_.kind == SeqKind::Vertex) {
    if (token == kEos) {
      finished_ = true;
    } else {
      cur_coords_[t_ % 3] = token;
      if (t_ % 3 == 2)
        prev_triplet_ = BinTriple{cur_coords_[0], cur_coords_[1], cur_coords_[2]};
    }
    ++t_;
    return;
  }

  if (token == kEos) {
    finished_ = true;
  } else if (token == kSep) {
    prev_was_sep_ = true;
    group_count_ = 0;
  } else {
    if (group_count_ == 0) prev_group_first_ = token;
    prev_was_sep_ = false;
    last_token_ = token;
    ++group_count_;
    if (vocab_.kind == SeqKind::Face) ++use_count_[token];
  }
  ++t_;
}

TokenSequence flatten_vertices(const IndexedBRep& b) {
  TokenSequence seq{SeqKind::Vertex, {}};
  seq.tokens.reserve(3 * b.vertices.size() + 1);
  for (const BinTriple& v : b.vertices) {
    seq.tokens.push_back(v[0]);
    seq.tokens.push_back(v[1]);
    seq.tokens.push_back(v[2]);
  }
  seq.tokens.push_back(kEos);
  return seq;
}

namespace {
TokenSequence flatten_groups(SeqKind kind, const std::vector<std::vector<int>>& groups) {
  TokenSequence seq{kind, {}};
  for (size_t i = 0; i < groups.size(); ++i) {
    if (i > 0) seq.tokens.push_back(kSep);
    seq.tokens.insert(seq.tokens.end(), groups[i].begin(), groups[i].end());
  }
  seq.tokens.push_back(kEos);
  return seq;
}
}  // namespace

TokenSequence flatten_edges(const IndexedBRep& b) {
  return flatten_groups(SeqKind::Edge, b.edges);
}

TokenSequence flatten_faces(const IndexedBRep& b) {
  return flatten_groups(SeqKind::Face, b.faces);
}

ReplayResult replay_validate(SeqKind kind, const std::vector<int>& tokens, int base) {
  MaskState st(Vocab{kind, base});
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (st.finished()) return {false, int(i), "token after EOS"};
    if (const char* rule = st.check(tokens[i])) return {false, int(i), rule};
    st.advance(tokens[i]);
  }
  if (!st.finished()) return {false, int(tokens.size()), "missing EOS"};
  return {};
}

namespace {
std::vector<std::vector<int>> unflatten_groups(SeqKind kind,
                                               const std::vector<int>& tokens,
                                               int base) {
  // [EOS] alone is an acceptable empty component even though the grammar
  // never emits it.
  if (tokens.size() == 1 && tokens[0] == kEos) return {};
  const ReplayResult r = replay_validate(kind, tokens, base);
  if (!r.ok) throw GrammarViolation(r.step, r.rule);

  std::vector<std::vector<int>> groups;
  std::vector<int> cur;
  for (int tok : tokens) {
    if (tok == kSep || tok == kEos) {
      groups.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(tok);
    }
  }
  return groups;
}
}  // namespace

std::vector<BinTriple> unflatten_vertices(const std::vector<int>& tokens, int levels) {
  if (tokens.size() == 1 && tokens[0] == kEos) return {};
  const ReplayResult r = replay_validate(SeqKind::Vertex, tokens, levels);
  if (!r.ok) throw GrammarViolation(r.step, r.rule);
  std::vector<BinTriple> out;
  for (size_t i = 0; i + 3 <= tokens.size(); i += 3)
    out.push_back({tokens[i], tokens[i + 1], tokens[i + 2]});
  return out;
}

std::vector<std::vector<int>> unflatten_edges(const std::vector<int>& tokens,
                                              int num_vertices) {
  return unflatten_groups(SeqKind::Edge, tokens, num_vertices);
}

std::vector<std::vector<int>> unflatten_faces(const std::vector<int>& tokens,
                                              int num_edges) {
  return unflatten_groups(SeqKind::Face, tokens, num_edges);
}

}  // namespace ibrep
