#pragma once

#include "ibrep/dedup.hpp"
#include "ibrep/kernel.hpp"
#include "ibrep/tokens.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace ibrep {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An indexed B-rep plus the grid that anchors its bins in model space.
struct IbrepFile {
  IndexedBRep brep;
  QuantGrid grid;
};

/// Canonical JSON bytes. Vertices are written in (x, y, z) order with an
/// explicit "order" field; the parser converts back to the internal
/// (z, y, x) layout. Serialization is deterministic, so re-serializing a
/// parsed document reproduces it byte for byte.
std::string serialize_ibrep(const IbrepFile& f);

/// Strict parser: unknown fields, bad cardinalities, and out-of-range
/// indices are rejected with the offending entity named.
IbrepFile parse_ibrep(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

IbrepFile load_ibrep(const std::filesystem::path& path);
void save_ibrep(const std::filesystem::path& path, const IbrepFile& f);

/// Token files hold one integer per line; EOS is -1 and the group
/// separator is -2.
std::string serialize_tokens(const TokenSequence& seq);
std::vector<int> parse_token_lines(const std::string& text);

/// Sidecar carrying the grid through an encode/decode round trip.
std::string serialize_grid_meta(const QuantGrid& grid);
QuantGrid parse_grid_meta(const std::string& text);

struct EncodedModel {
  TokenSequence vertices, edges, faces;
  QuantGrid grid;
};

EncodedModel encode_model(const IbrepFile& f);
IbrepFile decode_model(const std::vector<int>& vtok, const std::vector<int>& etok,
                       const std::vector<int>& ftok, const QuantGrid& grid);

/// Hash files: newline-delimited lowercase hex. Sets are sorted and
/// deduplicated; plain lists keep their order.
std::string serialize_hash_lines(const std::vector<std::string>& hashes,
                                 bool sorted_set = false);
std::set<std::string> parse_hash_set(const std::string& text);

/// Wavefront OBJ with one group per face; positions then 1-based triangle
/// index triplets.
std::string serialize_obj(const SolidModel& model);

/// Machine-readable validity report.
std::string serialize_report_json(const SolidModel& model);

/// Applies `fn` to every item with a bounded worker pool, preserving input
/// order in the output. Thread count comes from IBREP_THREADS when set,
/// otherwise the hardware concurrency.
int worker_count();
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, Fn fn)
    -> std::vector<decltype(fn(items[0]))>;

}  // namespace ibrep

#include "ibrep/io_impl.hpp"
