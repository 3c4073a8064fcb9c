// Command-line surface for the indexed B-rep toolkit.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 grammar violation,
// 3 validity-check failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "ibrep/fixtures.hpp"
#include "ibrep/io.hpp"
#include "ibrep/sampler.hpp"

#include <filesystem>
#include <iostream>
#include <map>

using namespace ibrep;
namespace fs = std::filesystem;

namespace {

struct ValidityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<fs::path> expand_corpus(const std::vector<std::string>& args) {
  std::vector<fs::path> files;
  for (const std::string& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- encode / decode -------------------------------------------------------

void cmd_encode(const std::string& input, const std::string& prefix) {
  const IbrepFile f = load_ibrep(input);
  const EncodedModel enc = encode_model(f);
  write_file(prefix + ".v.tokens", serialize_tokens(enc.vertices));
  write_file(prefix + ".e.tokens", serialize_tokens(enc.edges));
  write_file(prefix + ".f.tokens", serialize_tokens(enc.faces));
  write_file(prefix + ".meta.json", serialize_grid_meta(enc.grid));
  std::cout << "encoded " << input << " -> " << prefix << ".{v,e,f}.tokens\n";
}

void cmd_decode(const std::string& prefix, const std::string& output) {
  const auto vtok = parse_token_lines(read_file(prefix + ".v.tokens"));
  const auto etok = parse_token_lines(read_file(prefix + ".e.tokens"));
  const auto ftok = parse_token_lines(read_file(prefix + ".f.tokens"));
  const QuantGrid grid = parse_grid_meta(read_file(prefix + ".meta.json"));
  const IbrepFile f = decode_model(vtok, etok, ftok, grid);
  save_ibrep(output, f);
  std::cout << "decoded " << prefix << " -> " << output << "\n";
}

// ---- reconstruct -----------------------------------------------------------

void cmd_reconstruct(const std::string& input, const std::string& mesh_out,
                     const std::string& report_out, const Tolerances& tol) {
  const IbrepFile f = load_ibrep(input);
  const IndexedBRep canon = canonicalize(f.brep);
  const SolidModel m = reconstruct(canon, f.grid, tol);
  if (!mesh_out.empty()) write_file(mesh_out, serialize_obj(m));
  const std::string report = serialize_report_json(m);
  if (!report_out.empty())
    write_file(report_out, report);
  else
    std::cout << report;
  if (!m.report.all_ok())
    throw ValidityFailure("validity checks failed for " + input);
}

// ---- sample ----------------------------------------------------------------

std::unique_ptr<TokenScorer> make_scorer(const std::string& spec) {
  if (spec == "uniform") return std::make_unique<UniformScorer>();
  if (spec.rfind("ngram:", 0) == 0) {
    const size_t second = spec.find(':', 6);
    if (second == std::string::npos)
      throw ParseError("scorer spec must be ngram:<order>:<corpus path>");
    const int order = std::stoi(spec.substr(6, second - 6));
    const std::vector<fs::path> files = expand_corpus({spec.substr(second + 1)});
    if (files.empty()) throw ParseError("ngram corpus is empty");
    std::vector<TokenSequence> corpus;
    for (const fs::path& p : files) {
      const IndexedBRep b = canonicalize(load_ibrep(p).brep);
      corpus.push_back(flatten_vertices(b));
      corpus.push_back(flatten_edges(b));
      corpus.push_back(flatten_faces(b));
    }
    return std::make_unique<NGramScorer>(ngram_fit(corpus, order));
  }
  throw ParseError("unknown scorer spec \"" + spec + "\" (uniform | ngram:...)");
}

void cmd_sample(const std::string& scorer_spec, int n, double top_p,
                double temperature, std::uint64_t seed, int bits,
                int max_tokens, const std::string& out_dir,
                const std::string& train_hashes_path) {
  const auto scorer = make_scorer(scorer_spec);
  fs::create_directories(out_dir);

  std::vector<int> indices(n);
  for (int i = 0; i < n; ++i) indices[i] = i;
  // Sample i draws from substreams of seed + i.
  const auto results = parallel_map(indices, [&](int i) {
    SamplerConfig cfg;
    cfg.top_p = top_p;
    cfg.temperature = temperature;
    cfg.seed = seed + std::uint64_t(i);
    cfg.max_tokens = max_tokens;
    return generate(*scorer, bits, cfg);
  });

  std::vector<SampleRecord> records;
  std::string lines;
  for (int i = 0; i < n; ++i) {
    const GenerationResult& r = results[i];
    const bool valid = r.outcome == Outcome::Completed && r.structurally_valid;
    lines += "{\"index\":" + std::to_string(i) + ",\"outcome\":\"" +
             outcome_name(r.outcome) + "\",\"valid\":" + (valid ? "true" : "false");
    if (valid) {
      IbrepFile f;
      f.grid.bits = bits;
      f.brep = *r.assembled;
      char name[64];
      std::snprintf(name, sizeof(name), "sample_%05d.ibrep.json", i);
      save_ibrep(fs::path(out_dir) / name, f);
      lines += ",\"file\":\"" + std::string(name) + "\",\"hash\":\"" +
               content_hash(f.brep).combined() + "\"";
      records.push_back({f.brep, true});
    } else {
      records.push_back({IndexedBRep{}, false});
    }
    lines += "}\n";
  }
  write_file(fs::path(out_dir) / "results.jsonl", lines);

  std::set<std::string> train;
  if (!train_hashes_path.empty()) train = parse_hash_set(read_file(train_hashes_path));
  const Metrics m = compute_metrics(records, train);
  std::cout << "samples=" << m.total << " valid=" << m.valid_pct << "%";
  if (!train_hashes_path.empty()) std::cout << " novel=" << m.novel_pct << "%";
  std::cout << " unique=" << m.unique_pct << "%";
  if (m.undefined) std::cout << " (undefined: no valid samples)";
  std::cout << "\n";
}

// ---- hash / dedup / stats / filter ----------------------------------------

void cmd_hash(const std::vector<std::string>& inputs, const std::string& out,
              bool sorted_set) {
  const auto files = expand_corpus(inputs);
  const auto hashes = parallel_map(files, [](const fs::path& p) {
    return content_hash(canonicalize(load_ibrep(p).brep)).combined();
  });
  std::vector<std::string> rows;
  for (const auto& h : hashes) rows.push_back(h);
  const std::string text = serialize_hash_lines(rows, sorted_set);
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

void cmd_dedup(const std::vector<std::string>& inputs, const std::string& out) {
  const auto files = expand_corpus(inputs);
  const auto hashes = parallel_map(files, [](const fs::path& p) {
    return content_hash(canonicalize(load_ibrep(p).brep)).combined();
  });
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < files.size(); ++i) groups[hashes[i]].push_back(i);

  // One representative per hash (first in input order), then duplicates.
  std::string text;
  size_t reps = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    const auto& group = groups[hashes[i]];
    if (group.front() != i) continue;
    ++reps;
    text += hashes[i] + " " + files[i].string();
    for (size_t k = 1; k < group.size(); ++k)
      text += " " + files[group[k]].string();
    text += "\n";
  }
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  std::cout << reps << " unique of " << files.size() << " models\n";
}

void cmd_stats(const std::vector<std::string>& inputs, const std::string& out) {
  const auto files = expand_corpus(inputs);
  if (files.empty()) std::cerr << "warning: empty corpus\n";

  struct Row {
    std::string file;
    int vertices = 0, edges = 0, faces = 0, arcs = 0, lines = 0;
    int vtokens = 0, etokens = 0, ftokens = 0;
  };
  const auto rows = parallel_map(files, [](const fs::path& p) {
    const IndexedBRep b = canonicalize(load_ibrep(p).brep);
    Row r;
    r.file = p.string();
    r.vertices = int(b.vertices.size());
    r.edges = int(b.edges.size());
    r.faces = int(b.faces.size());
    for (const auto& e : b.edges) (e.size() == 3 ? r.arcs : r.lines)++;
    r.vtokens = int(flatten_vertices(b).tokens.size());
    r.etokens = int(flatten_edges(b).tokens.size());
    r.ftokens = int(flatten_faces(b).tokens.size());
    return r;
  });

  nlohmann::ordered_json j;
  j["count"] = rows.size();
  auto histogram = [&](auto get) {
    std::map<int, int> h;
    for (const Row& r : rows) ++h[get(r)];
    nlohmann::ordered_json out_h = nlohmann::ordered_json::object();
    for (const auto& [k, v] : h) out_h[std::to_string(k)] = v;
    return out_h;
  };
  j["histograms"]["vertices"] = histogram([](const Row& r) { return r.vertices; });
  j["histograms"]["edges"] = histogram([](const Row& r) { return r.edges; });
  j["histograms"]["faces"] = histogram([](const Row& r) { return r.faces; });
  j["histograms"]["arcs"] = histogram([](const Row& r) { return r.arcs; });
  j["histograms"]["lines"] = histogram([](const Row& r) { return r.lines; });
  j["histograms"]["total_tokens"] = histogram(
      [](const Row& r) { return r.vtokens + r.etokens + r.ftokens; });
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const Row& r : rows) {
    nlohmann::ordered_json jm;
    jm["file"] = r.file;
    jm["vertices"] = r.vertices;
    jm["edges"] = r.edges;
    jm["faces"] = r.faces;
    jm["arcs"] = r.arcs;
    jm["lines"] = r.lines;
    jm["tokens"] = {{"vertex", r.vtokens}, {"edge", r.etokens}, {"face", r.ftokens}};
    models.push_back(std::move(jm));
  }
  j["models"] = std::move(models);
  const std::string text = j.dump(1) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

void cmd_filter(const std::vector<std::string>& inputs, int max_tokens) {
  const auto files = expand_corpus(inputs);
  if (files.empty()) std::cerr << "warning: empty corpus\n";
  const auto decisions = parallel_map(files, [&](const fs::path& p) {
    const IndexedBRep b = canonicalize(load_ibrep(p).brep);
    return corpus_filter(b, max_tokens);
  });
  for (size_t i = 0; i < files.size(); ++i) {
    if (decisions[i].keep)
      std::cout << "keep " << files[i].string() << "\n";
    else
      std::cout << "drop " << files[i].string() << " (" << decisions[i].reason
                << ")\n";
  }
}

void cmd_gen_fixtures(const std::string& family, int n, std::uint64_t seed,
                      const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fixtures::Family> fams;
  if (family == "all")
    fams.assign(std::begin(fixtures::kAllFamilies), std::end(fixtures::kAllFamilies));
  else
    fams.push_back(fixtures::family_from_name(family));
  int written = 0;
  for (fixtures::Family f : fams) {
    for (int i = 0; i < n; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04d.ibrep.json",
                    fixtures::family_name(f), i);
      save_ibrep(fs::path(out_dir) / name, fixtures::make(f, seed, i));
      ++written;
    }
  }
  std::cout << "wrote " << written << " fixture files to " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"indexed B-rep toolkit: encoding, grammar-masked sampling, "
               "reconstruction, hashing"};
  app.require_subcommand(1);

  // encode
  std::string in_file, out_prefix = "model";
  CLI::App* enc = app.add_subcommand("encode", "flatten a model into token files");
  enc->add_option("input", in_file, "IBREP-JSON file")->required();
  enc->add_option("--out-prefix", out_prefix, "output path prefix");

  // decode
  std::string dec_prefix, dec_out = "decoded.ibrep.json";
  CLI::App* dec = app.add_subcommand("decode", "rebuild a model from token files");
  dec->add_option("--prefix", dec_prefix, "token file prefix")->required();
  dec->add_option("--out", dec_out, "output IBREP-JSON file");

  // reconstruct
  std::string rec_in, rec_mesh, rec_report;
  Tolerances rec_tol;
  CLI::App* rec = app.add_subcommand("reconstruct",
                                     "build curves, wires, surfaces, and a mesh");
  rec->add_option("input", rec_in, "IBREP-JSON file")->required();
  rec->add_option("--mesh", rec_mesh, "write a Wavefront OBJ here");
  rec->add_option("--report", rec_report, "write the validity report here");
  rec->add_option("--geom-eps", rec_tol.geom_eps, "coincidence tolerance");
  rec->add_option("--wire-eps", rec_tol.wire_eps, "wire check tolerance");
  rec->add_option("--arc-samples", rec_tol.arc_samples, "max arc segments");

  // sample
  std::string scorer_spec = "uniform", sample_out = "samples", train_hashes;
  int sample_n = 10, sample_bits = 6, sample_max_tokens = 256;
  double top_p = 0.9, temperature = 1.0;
  std::uint64_t sample_seed = 0;
  CLI::App* smp = app.add_subcommand("sample", "masked nucleus sampling");
  smp->add_option("--scorer", scorer_spec, "uniform | ngram:<order>:<corpus>");
  smp->add_option("--n", sample_n, "number of samples");
  smp->add_option("--top-p", top_p, "nucleus mass");
  smp->add_option("--temperature", temperature, "softmax temperature");
  smp->add_option("--seed", sample_seed, "base seed; sample i uses seed+i");
  smp->add_option("--bits", sample_bits, "coordinate quantization bits");
  smp->add_option("--max-tokens", sample_max_tokens, "per-sequence cap");
  smp->add_option("--out", sample_out, "output directory");
  smp->add_option("--train-hashes", train_hashes, "hash set file for novel%");

  // hash
  std::vector<std::string> hash_inputs;
  std::string hash_out;
  bool hash_sorted = false;
  CLI::App* hsh = app.add_subcommand("hash", "content hashes of models");
  hsh->add_option("inputs", hash_inputs, "files or directories")->required();
  hsh->add_option("-o,--out", hash_out, "output file (default stdout)");
  hsh->add_flag("--sorted-set", hash_sorted, "emit a sorted, deduplicated set");

  // dedup
  std::vector<std::string> dedup_inputs;
  std::string dedup_out;
  CLI::App* ddp = app.add_subcommand("dedup", "group duplicate models by hash");
  ddp->add_option("inputs", dedup_inputs, "files or directories")->required();
  ddp->add_option("-o,--out", dedup_out, "output file (default stdout)");

  // stats
  std::vector<std::string> stats_inputs;
  std::string stats_out;
  CLI::App* sts = app.add_subcommand("stats", "corpus statistics");
  sts->add_option("inputs", stats_inputs, "files or directories")->required();
  sts->add_option("-o,--out", stats_out, "output file (default stdout)");

  // filter
  std::vector<std::string> filter_inputs;
  int filter_max_tokens = 200;
  CLI::App* flt = app.add_subcommand("filter", "apply the corpus admission rule");
  flt->add_option("inputs", filter_inputs, "files or directories")->required();
  flt->add_option("--max-tokens", filter_max_tokens, "token budget");

  // gen-fixtures
  std::string gen_family = "all", gen_out = "fixtures";
  int gen_n = 10;
  std::uint64_t gen_seed = 0;
  CLI::App* gen = app.add_subcommand("gen-fixtures", "procedural solid corpus");
  gen->add_option("--family", gen_family,
                  "box|pocket|fillet|cone|sphere|torus|all");
  gen->add_option("--n", gen_n, "fixtures per family");
  gen->add_option("--seed", gen_seed, "sweep seed");
  gen->add_option("--out", gen_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc) cmd_encode(in_file, out_prefix);
    if (*dec) cmd_decode(dec_prefix, dec_out);
    if (*rec) cmd_reconstruct(rec_in, rec_mesh, rec_report, rec_tol);
    if (*smp)
      cmd_sample(scorer_spec, sample_n, top_p, temperature, sample_seed,
                 sample_bits, sample_max_tokens, sample_out, train_hashes);
    if (*hsh) cmd_hash(hash_inputs, hash_out, hash_sorted);
    if (*ddp) cmd_dedup(dedup_inputs, dedup_out);
    if (*sts) cmd_stats(stats_inputs, stats_out);
    if (*flt) cmd_filter(filter_inputs, filter_max_tokens);
    if (*gen) cmd_gen_fixtures(gen_family, gen_n, gen_seed, gen_out);
  } catch (const GrammarViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidityFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
