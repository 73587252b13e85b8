#include "robustrank/edge_list_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "robustrank/errors.hpp"

namespace robustrank {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<std::size_t> parse_id(std::string_view s) {
  std::size_t value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw InputError("edge list line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

EdgeList parse_edge_list(std::istream& in) {
  EdgeList list;
  std::optional<std::size_t> declared_n;
  std::size_t max_id = 0;
  bool any_id = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.starts_with("n=")) {
      const auto n = parse_id(trim(line.substr(2)));
      if (!n) fail(line_no, "bad node count header");
      declared_n = *n;
      continue;
    }
    if (line.starts_with("dangling:")) {
      const auto id = parse_id(trim(line.substr(9)));
      if (!id) fail(line_no, "bad dangling directive");
      list.dangling.push_back(*id);
      max_id = any_id ? std::max(max_id, *id) : *id;
      any_id = true;
      continue;
    }

    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) fail(line_no, "expected two node ids");
    const auto src = parse_id(line.substr(0, sep));
    const auto dst = parse_id(trim(line.substr(sep)));
    if (!src || !dst) fail(line_no, "node ids must be nonnegative integers");
    list.edges.push_back({*src, *dst});
    const std::size_t hi = std::max(*src, *dst);
    max_id = any_id ? std::max(max_id, hi) : hi;
    any_id = true;
  }
  if (in.bad()) throw InputError("error while reading edge list");

  if (declared_n) {
    if (any_id && max_id >= *declared_n) {
      throw InputError("node id " + std::to_string(max_id) + " exceeds declared n=" +
                       std::to_string(*declared_n));
    }
    list.node_count = *declared_n;
  } else {
    list.node_count = any_id ? max_id + 1 : 0;
  }
  if (list.node_count == 0) throw InputError("edge list defines no nodes");
  return list;
}

EdgeList read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const EdgeList& list) {
  out << "n=" << list.node_count << '\n';
  for (const Edge& e : list.edges) out << e.source << '\t' << e.target << '\n';
  for (NodeId d : list.dangling) out << "dangling:" << d << '\n';
}

}  // namespace robustrank
