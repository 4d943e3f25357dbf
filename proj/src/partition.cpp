#include "kgds/partition.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "kgds/error.hpp"
#include "kgds/shell.hpp"

namespace kgds {

Dims::Dims(int m_, int n_) : m(m_), n(n_) {
  if (m < 1 || n < 1)
    throw ValidationError("dimensions must satisfy m >= 1 and n >= 1, got m=" + std::to_string(m) +
                          " n=" + std::to_string(n));
}

namespace {

std::string part_label(const std::vector<int>& part) {
  std::string s = "{";
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(part[i]);
  }
  return s + "}";
}

}  // namespace

Partition::Partition(Dims dims, std::vector<std::vector<int>> parts) : dims_(dims) {
  const int total = dims.total();
  std::vector<int> owner(static_cast<std::size_t>(total) + 1, -1);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    auto& part = parts[j];
    std::sort(part.begin(), part.end());
    if (part.size() < 2)
      throw ValidationError("part " + part_label(part) + " has size " + std::to_string(part.size()) +
                            "; every part needs at least 2 indices");
    for (int idx : part) {
      if (idx < 1 || idx > total)
        throw ValidationError("part " + part_label(part) + " has index " + std::to_string(idx) +
                              " outside 1.." + std::to_string(total));
      if (owner[idx] != -1)
        throw ValidationError("part " + part_label(part) + " overlaps part " + part_label(parts[owner[idx]]) +
                              " at index " + std::to_string(idx));
      owner[idx] = static_cast<int>(j);
    }
  }
  for (int idx = 1; idx <= total; ++idx)
    if (owner[idx] == -1) throw ValidationError("index " + std::to_string(idx) + " is not covered by any part");

  auto group = [&](const std::vector<int>& part) {
    const bool meets_p = part.front() <= dims.m;
    const bool meets_q = part.back() > dims.m;
    return meets_p && meets_q ? 0 : (meets_p ? 1 : 2);
  };
  std::stable_sort(parts.begin(), parts.end(), [&](const auto& x, const auto& y) {
    const int gx = group(x), gy = group(y);
    return gx != gy ? gx < gy : x.front() < y.front();
  });
  for (auto& part : parts) {
    Part out;
    out.indices = part;
    for (int idx : part) {
      if (idx <= dims.m)
        out.p_coords.push_back(idx - 1);
      else
        out.q_coords.push_back(idx - dims.m - 1);
    }
    const int g = group(part);
    if (g == 0) ++a_;
    if (g <= 1) ++b_;
    parts_.push_back(std::move(out));
  }
}

Partition Partition::trivial(Dims dims) {
  std::vector<int> all(static_cast<std::size_t>(dims.total()));
  std::iota(all.begin(), all.end(), 1);
  return Partition(dims, {all});
}

std::vector<std::vector<int>> Partition::raw() const {
  std::vector<std::vector<int>> out;
  for (const auto& p : parts_) out.push_back(p.indices);
  return out;
}

std::string Partition::to_string() const {
  std::string s;
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    if (j) s += "|";
    for (std::size_t i = 0; i < parts_[j].indices.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[j].indices[i]);
    }
  }
  return s;
}

Partition parse_partition(Dims dims, std::string_view spec) {
  std::vector<std::vector<int>> parts;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto bar = spec.find('|', start);
    const auto chunk = spec.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    std::vector<int> part;
    std::size_t s = 0;
    while (s <= chunk.size()) {
      const auto comma = chunk.find(',', s);
      auto tok = chunk.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      int v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
        throw ValidationError("partition '" + std::string(spec) + "': bad index '" + std::string(tok) + "'");
      part.push_back(v);
      if (comma == std::string_view::npos) break;
      s = comma + 1;
    }
    parts.push_back(std::move(part));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return Partition(dims, std::move(parts));
}

bool in_P_pi(const Partition& pi, std::span<const std::int64_t> p, std::span<const std::int64_t> q) {
  const auto& d = pi.dims();
  if (static_cast<int>(p.size()) != d.m || static_cast<int>(q.size()) != d.n)
    throw ValidationError("in_P_pi: expected p of length " + std::to_string(d.m) + " and q of length " +
                          std::to_string(d.n));
  for (const auto& part : pi.parts()) {
    std::int64_t g = 0;
    for (int i : part.p_coords) g = std::gcd(g, p[i] < 0 ? -p[i] : p[i]);
    for (int i : part.q_coords) g = std::gcd(g, q[i] < 0 ? -q[i] : q[i]);
    if (g != 1) return false;
  }
  return true;
}

bool in_Q_pi(const Partition& pi, std::span<const std::int64_t> q) {
  if (static_cast<int>(q.size()) != pi.dims().n)
    throw ValidationError("in_Q_pi: expected q of length " + std::to_string(pi.dims().n));
  for (int j = pi.b(); j < pi.k(); ++j) {
    std::int64_t g = 0;
    for (int i : pi.parts()[j].q_coords) g = std::gcd(g, q[i] < 0 ? -q[i] : q[i]);
    if (g != 1) return false;
  }
  return true;
}

bool has_ell(const Partition& pi) {
  for (const auto& part : pi.parts())
    if (part.indices.size() >= 3 && !part.q_coords.empty()) return true;
  return false;
}

Box::Box(std::vector<Frac> a, std::vector<Frac> b, std::int64_t s)
    : alpha(std::move(a)), beta(std::move(b)), scale(s) {
  if (alpha.empty() || alpha.size() != beta.size()) throw ValidationError("box needs matching nonempty alpha/beta");
  if (scale < 1) throw ValidationError("box scale must be positive");
  const Frac zero(0, 1), one(1, 1);
  const Frac width = beta[0] - alpha[0];
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < zero || !(alpha[i] < beta[i]) || one < beta[i])
      throw ValidationError("box coordinate " + std::to_string(i) + " needs 0 <= alpha < beta <= 1, got [" +
                            kgds::to_string(alpha[i]) + ", " + kgds::to_string(beta[i]) + "]");
    if (!(beta[i] - alpha[i] == width))
      throw ValidationError("box widths must all equal gamma = " + kgds::to_string(width));
  }
}

Box Box::full(int d, std::int64_t scale) {
  return Box(std::vector<Frac>(static_cast<std::size_t>(d), Frac(0, 1)),
             std::vector<Frac>(static_cast<std::size_t>(d), Frac(1, 1)), scale);
}

Box Box::with_scale(std::int64_t s) const { return Box(alpha, beta, s); }

}  // namespace kgds
