// Acceptance suite: end-to-end checks over the whole toolkit, one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include "ibrep/dedup.hpp"
#include "ibrep/fixtures.hpp"
#include "ibrep/io.hpp"
#include "ibrep/kernel.hpp"
#include "ibrep/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

using namespace ibrep;
namespace fx = ibrep::fixtures;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  if (!ok) ++g_failures;
}

std::vector<IbrepFile> the_corpus() {
  static const std::vector<IbrepFile> corpus = fx::corpus(2024, 100);
  return corpus;
}

double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

Vec3 rand_unit(std::mt19937_64& g) {
  while (true) {
    Vec3 v(2 * uniform01(g) - 1, 2 * uniform01(g) - 1, 2 * uniform01(g) - 1);
    if (v.norm() > 1e-3 && v.norm() <= 1) return v.normalized();
  }
}

// Independent circle oracle: the algebraic least-squares circle fit in the
// points' own plane (solve |p-c|^2 = r^2 as a linear system), a different
// route than the perpendicular-bisector construction under test.
void kasa_circle(const Vec3& a, const Vec3& b, const Vec3& c, Vec3* center,
                 double* radius) {
  const Vec3 e1 = (b - a).normalized();
  Vec3 e2 = (c - a) - (c - a).dot(e1) * e1;
  e2.normalize();
  const Eigen::Vector2d p1(0, 0);
  const Eigen::Vector2d p2((b - a).dot(e1), (b - a).dot(e2));
  const Eigen::Vector2d p3((c - a).dot(e1), (c - a).dot(e2));

  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  const Eigen::Vector2d pts[3] = {p1, p2, p3};
  for (int i = 0; i < 3; ++i) {
    m.row(i) << 2 * pts[i].x(), 2 * pts[i].y(), 1.0;
    rhs(i) = pts[i].squaredNorm();
  }
  const Eigen::Vector3d sol = m.colPivHouseholderQr().solve(rhs);
  *center = a + sol(0) * e1 + sol(1) * e2;
  *radius = std::sqrt(sol(2) + sol(0) * sol(0) + sol(1) * sol(1));
}

// ---------------------------------------------------------------------------

void criterion_1_grammar_completeness() {
  const auto t0 = Clock::now();
  const auto corpus = the_corpus();
  int checked = 0, ok = 0;
  for (const IbrepFile& f : corpus) {
    const IndexedBRep& b = f.brep;
    const bool v = replay_validate(SeqKind::Vertex, flatten_vertices(b).tokens,
                                   f.grid.levels())
                       .ok;
    const bool e =
        replay_validate(SeqKind::Edge, flatten_edges(b).tokens,
                        int(b.vertices.size()))
            .ok;
    const bool fc = replay_validate(SeqKind::Face, flatten_faces(b).tokens,
                                    int(b.edges.size()))
                        .ok;
    ++checked;
    ok += v && e && fc;
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d/%d fixture sequence triples replay (%.2fs)",
                ok, checked, dt);
  report(1, "grammar completeness", checked >= 500 && ok == checked && dt < 10.0,
         buf);
}

void criterion_2_grammar_soundness() {
  const auto t0 = Clock::now();
  const UniformScorer scorer;
  int out_of_mask = 0, completed = 0, structural_ok = 0;

  auto replay_prefix = [&](SeqKind kind, int base, const std::vector<int>& toks) {
    MaskState st(Vocab{kind, base});
    for (int tok : toks) {
      if (!st.is_valid(tok)) return false;
      st.advance(tok);
    }
    return true;
  };

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.top_p = 1.0;
    cfg.max_tokens = 160;
    const GenerationResult r = generate(scorer, 6, cfg);

    if (!replay_prefix(SeqKind::Vertex, 64, r.vertex_seq.tokens)) ++out_of_mask;
    if (!r.edge_seq.tokens.empty()) {
      const auto verts = unflatten_vertices(r.vertex_seq.tokens, 64);
      if (!replay_prefix(SeqKind::Edge, int(verts.size()), r.edge_seq.tokens))
        ++out_of_mask;
      if (!r.face_seq.tokens.empty()) {
        // The face vocabulary points at the deduplicated edge list.
        auto edges = unflatten_edges(r.edge_seq.tokens, int(verts.size()));
        for (auto& e : edges) std::sort(e.begin(), e.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        if (!replay_prefix(SeqKind::Face, int(edges.size()), r.face_seq.tokens))
          ++out_of_mask;
      }
    }
    if (r.outcome == Outcome::Completed) {
      ++completed;
      structural_ok += r.structurally_valid &&
                       structural_check(*r.assembled).empty();
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1000 generations, %d out-of-mask tokens, %d/%d completed pass "
                "structural_check (%.2fs)",
                out_of_mask, structural_ok, completed, dt);
  report(2, "grammar soundness",
         out_of_mask == 0 && completed > 0 && structural_ok == completed &&
             dt < 60.0,
         buf);
}

void criterion_3_codec_round_trip() {
  const auto corpus = the_corpus();
  int ok = 0;
  for (const IbrepFile& f : corpus) {
    const EncodedModel enc = encode_model(f);
    const IbrepFile back = decode_model(enc.vertices.tokens, enc.edges.tokens,
                                        enc.faces.tokens, enc.grid);
    const std::string text = serialize_ibrep(f);
    const bool bytes_stable = serialize_ibrep(parse_ibrep(text)) == text;
    ok += back.brep == f.brep && bytes_stable;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d/%zu exact round trips, byte-stable", ok,
                the_corpus().size());
  report(3, "codec round trip", ok == int(the_corpus().size()), buf);
}

void criterion_4_reconstruction_validity() {
  const auto t0 = Clock::now();
  int pass = 0, total = 0;
  for (fx::Family fam : fx::kAllFamilies) {
    for (int i = 0; i < 60; ++i) {
      const IbrepFile f = fx::make(fam, 7, i);
      const SolidModel m = reconstruct(f.brep, f.grid);
      ++total;
      pass += m.report.all_ok() && m.report.closed_solid;
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d/%d fixtures pass all four checks and close (%.2fs)", pass,
                total, dt);
  report(4, "reconstruction validity", pass == total && dt < 60.0, buf);
}

void criterion_5_surface_classification() {
  const double eps = 1e-6;
  bool ok = true;
  std::string detail;

  struct Expect {
    fx::Family family;
    const char* surface;
    bool bound_residual;
  };
  const Expect expectations[] = {{fx::Family::Box, "plane", true},
                                 {fx::Family::Fillet, "cylinder", true},
                                 {fx::Family::Cone, "cone", false},
                                 {fx::Family::Sphere, "sphere", true},
                                 {fx::Family::Torus, "torus", false}};

  for (const Expect& e : expectations) {
    const IbrepFile f = fx::canonical(e.family);
    const SolidModel m = reconstruct(f.brep, f.grid);
    bool found = false;
    double max_dist = 0;
    for (const FaceRecon& fc : m.faces) {
      if (!fc.ok || !fc.surface) {
        ok = false;
        continue;
      }
      if (std::string(surface_type_name(*fc.surface)) != e.surface) continue;
      found = true;
      for (const Vec3& p : fc.mesh.positions)
        max_dist = std::max(max_dist, surface_distance(*fc.surface, p));
    }
    const bool this_ok = found && (!e.bound_residual || max_dist <= eps);
    ok = ok && this_ok;
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%s=%s(%.1e) ", e.surface,
                  this_ok ? "ok" : "FAIL", max_dist);
    detail += buf;
  }
  report(5, "surface classification", ok, detail);
}

void criterion_6_arc_recovery() {
  std::mt19937_64 g(20240809);
  int circle_ok = 0, mid_ok = 0;
  const int trials = 1000;

  for (int t = 0; t < trials; ++t) {
    const Vec3 center(4 * uniform01(g) - 2, 4 * uniform01(g) - 2,
                      4 * uniform01(g) - 2);
    const double radius = 0.05 + 2.95 * uniform01(g);
    const Vec3 n = rand_unit(g);
    const Vec3 e1 = n.unitOrthogonal();
    const Vec3 e2 = n.cross(e1);
    auto at = [&](double th) {
      return center + radius * (std::cos(th) * e1 + std::sin(th) * e2);
    };

    // Three well-separated points for the circle oracle.
    const double t1 = 2 * M_PI * uniform01(g);
    const double t2 = t1 + 0.4 + 1.5 * uniform01(g);
    const double t3 = t2 + 0.4 + 1.5 * uniform01(g);
    Vec3 oracle_center;
    double oracle_radius;
    kasa_circle(at(t1), at(t2), at(t3), &oracle_center, &oracle_radius);
    const Circle3 got = circle_through_3(at(t1), at(t2), at(t3));
    if ((got.center - oracle_center).norm() <= 1e-9 * (1 + oracle_radius) &&
        std::abs(got.radius - oracle_radius) <= 1e-9 * (1 + oracle_radius))
      ++circle_ok;

    // Shuffled arc triple: the half-parameter point must be recovered.
    const double sweep = 0.3 + (2 * M_PI - 0.6) * uniform01(g);
    std::array<Vec3, 3> pts = {at(0), at(sweep / 2), at(sweep)};
    int mid_pos = 1;
    for (int k = 2; k >= 1; --k) {  // Fisher-Yates, tracking the midpoint
      const int j = int(g() % (k + 1));
      std::swap(pts[k], pts[j]);
      if (mid_pos == k)
        mid_pos = j;
      else if (mid_pos == j)
        mid_pos = k;
    }
    const ArcMidPick pick = resolve_arc_midpoint(pts, 1e-6);
    if (pick.mid_index == mid_pos) ++mid_ok;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "circle vs least-squares oracle %d/%d, midpoint recovery %d/%d",
                circle_ok, trials, mid_ok, trials);
  report(6, "arc recovery", circle_ok == trials && mid_ok == trials, buf);
}

void criterion_7_hash_invariance() {
  std::mt19937_64 g(99);
  std::vector<IndexedBRep> suite;
  for (fx::Family fam : fx::kAllFamilies)
    for (int i = 0; i < 4; ++i) suite.push_back(fx::make(fam, 77, i).brep);
  suite.resize(20);

  int perm_ok = 0, perm_total = 0;
  int perturb_ok = 0, perturb_total = 0;

  for (const IndexedBRep& b : suite) {
    const std::string ref = content_hash(b).combined();

    for (int t = 0; t < 200; ++t) {
      // Random relabeling that canonicalization must undo.
      IndexedBRep shuffled = b;
      std::vector<int> vperm(b.vertices.size());
      std::iota(vperm.begin(), vperm.end(), 0);
      std::shuffle(vperm.begin(), vperm.end(), g);
      shuffled.vertices.resize(b.vertices.size());
      for (size_t i = 0; i < b.vertices.size(); ++i)
        shuffled.vertices[vperm[i]] = b.vertices[i];
      std::vector<int> eperm(b.edges.size());
      std::iota(eperm.begin(), eperm.end(), 0);
      std::shuffle(eperm.begin(), eperm.end(), g);
      shuffled.edges.resize(b.edges.size());
      for (size_t i = 0; i < b.edges.size(); ++i) {
        std::vector<int> e;
        for (int v : b.edges[i]) e.push_back(vperm[v]);
        std::shuffle(e.begin(), e.end(), g);
        shuffled.edges[eperm[i]] = std::move(e);
      }
      shuffled.faces.clear();
      for (const auto& face : b.faces) {
        std::vector<int> nf;
        for (int e : face) nf.push_back(eperm[e]);
        std::shuffle(nf.begin(), nf.end(), g);
        shuffled.faces.push_back(std::move(nf));
      }
      std::shuffle(shuffled.faces.begin(), shuffled.faces.end(), g);

      ++perm_total;
      perm_ok += content_hash(canonicalize(shuffled)).combined() == ref;
    }

    for (int t = 0; t < 10; ++t) {
      // Move one vertex by one bin without colliding with another vertex.
      IndexedBRep nudged = b;
      bool moved = false;
      for (int attempt = 0; attempt < 100 && !moved; ++attempt) {
        const size_t vi = g() % nudged.vertices.size();
        const int axis = int(g() % 3);
        const int dir = (g() % 2) ? 1 : -1;
        BinTriple cand = nudged.vertices[vi];
        cand[axis] += dir;
        if (cand[axis] < 0 || cand[axis] > 63) continue;
        bool collides = false;
        for (const BinTriple& other : nudged.vertices)
          collides |= other == cand;
        if (collides) continue;
        nudged.vertices[vi] = cand;
        moved = true;
      }
      if (!moved) continue;
      ++perturb_total;
      try {
        perturb_ok += content_hash(canonicalize(nudged)).combined() != ref;
      } catch (const std::exception&) {
        // A perturbation that destroys the structure still counts as
        // distinguishable.
        ++perturb_ok;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "permutations %d/%d identical, perturbations %d/%d distinct",
                perm_ok, perm_total, perturb_ok, perturb_total);
  report(7, "hash invariance",
         perm_ok == perm_total && perm_total == 4000 &&
             perturb_ok == perturb_total && perturb_total >= 200,
         buf);
}

void criterion_8_sampler_statistics() {
  SamplerConfig cfg;
  cfg.top_p = 1.0;
  auto rng = substream_rng(4242, 0);

  const int k = 8, n = 10000;
  std::vector<double> scores(12, 0.0);
  std::vector<bool> valid(12, false);
  for (int i = 0; i < k; ++i) valid[i] = true;
  std::vector<int> counts(12, 0);
  for (int i = 0; i < n; ++i) ++counts[masked_step(scores, valid, cfg, rng)];

  const double p = 1.0 / k;
  const double sigma = std::sqrt(p * (1 - p) / n);
  bool freq_ok = true;
  double worst = 0;
  for (int i = 0; i < k; ++i) {
    const double dev = std::abs(counts[i] / double(n) - p);
    worst = std::max(worst, dev);
    freq_ok = freq_ok && dev <= 3 * sigma;
  }

  std::mt19937_64 g(5);
  SamplerConfig cold = cfg;
  cold.temperature = 1e-6;
  auto rng2 = substream_rng(4242, 1);
  int argmax_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> s(16);
    std::vector<bool> v(16);
    for (int i = 0; i < 16; ++i) {
      s[i] = double(g() % 100000) / 1000.0;
      v[i] = (g() % 2) == 0;
    }
    v[g() % 16] = true;
    int best = -1;
    for (int i = 0; i < 16; ++i)
      if (v[i] && (best < 0 || s[i] > s[best])) best = i;
    argmax_ok += masked_step(s, v, cold, rng2) == best;
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "uniform dev %.4f (3-sigma %.4f), argmax %d/1000 at T=1e-6",
                worst, 3 * sigma, argmax_ok);
  report(8, "sampler statistics", freq_ok && argmax_ok == 1000, buf);
}

void criterion_9_validity_dominance() {
  std::vector<TokenSequence> corpus;
  for (fx::Family fam : fx::kAllFamilies) {
    for (int i = 0; i < 25; ++i) {
      const IndexedBRep b = fx::make(fam, 31, i).brep;
      corpus.push_back(flatten_vertices(b));
      corpus.push_back(flatten_edges(b));
      corpus.push_back(flatten_faces(b));
    }
  }
  const NGramScorer scorer = ngram_fit(corpus, 3);

  int masked_valid = 0, unmasked_valid = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.top_p = 0.7;
    cfg.max_tokens = 200;
    const GenerationResult m = generate(scorer, 6, cfg);
    masked_valid += m.outcome == Outcome::Completed && m.structurally_valid;
    cfg.mask_enabled = false;
    const GenerationResult u = generate(scorer, 6, cfg);
    unmasked_valid += u.outcome == Outcome::Completed && u.structurally_valid;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "masked %d/100 valid vs unmasked %d/100 valid",
                masked_valid, unmasked_valid);
  report(9, "validity dominance", masked_valid >= unmasked_valid, buf);
}

void criterion_10_metrics_pipeline() {
  const IndexedBRep box = fx::canonical(fx::Family::Box).brep;
  const IndexedBRep fillet = fx::canonical(fx::Family::Fillet).brep;
  const IndexedBRep cone = fx::canonical(fx::Family::Cone).brep;
  const IndexedBRep octant = fx::canonical(fx::Family::Sphere).brep;
  const IndexedBRep ring = fx::canonical(fx::Family::Torus).brep;

  // 10 samples: the five canonical solids, duplicates of two of them, one
  // training-set match (the octant), and three invalid entries.
  // By hand: valid 7/10; novel 6/7; unique 5/7.
  const std::set<std::string> train = {content_hash(octant).combined()};
  const std::vector<SampleRecord> samples = {
      {box, true},  {fillet, true},      {cone, true},  {octant, true},
      {ring, true}, {box, true},         {ring, true},  {IndexedBRep{}, false},
      {box, false}, {IndexedBRep{}, false}};
  const Metrics m = compute_metrics(samples, train);

  const bool ok = m.total == 10 && m.valid == 7 && m.novel_count == 6 &&
                  m.unique_count == 5 &&
                  std::abs(m.valid_pct - 70.0) < 1e-9 &&
                  std::abs(m.novel_pct - 600.0 / 7.0) < 1e-9 &&
                  std::abs(m.unique_pct - 500.0 / 7.0) < 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "valid %.4f%% novel %.4f%% unique %.4f%% (counts %d/%d/%d)",
                m.valid_pct, m.novel_pct, m.unique_pct, m.valid, m.novel_count,
                m.unique_count);
  report(10, "metrics pipeline", ok, buf);
}

}  // namespace

int main() {
  criterion_1_grammar_completeness();
  criterion_2_grammar_soundness();
  criterion_3_codec_round_trip();
  criterion_4_reconstruction_validity();
  criterion_5_surface_classification();
  criterion_6_arc_recovery();
  criterion_7_hash_invariance();
  criterion_8_sampler_statistics();
  criterion_9_validity_dominance();
  criterion_10_metrics_pipeline();

  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
