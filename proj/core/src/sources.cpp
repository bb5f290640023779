#include "rdp/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rdp/binomial.hpp"

namespace rdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log2(sum_i 2^x_i), tolerant of -inf entries.
double log2_sum_exp2(const std::vector<double>& xs) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp2(x - peak);
  return peak + std::log2(acc);
}

double parse_fraction(const std::string& text, const char* what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("source spec: bad ") + what + " '" + text + "'");
  }
  if (used != text.size())
    throw std::invalid_argument(std::string("source spec: trailing junk in ") + what + " '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

SourceModel::SourceModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("SourceModel: component list is empty");
  double weight_sum = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0))
      throw std::invalid_argument("SourceModel: weights must be positive");
    if (!(c.p >= 0.0 && c.p <= 1.0))
      throw std::invalid_argument("SourceModel: p must be in [0, 1]");
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw std::invalid_argument("SourceModel: weights must sum to 1 within 1e-12");
}

SourceModel SourceModel::bernoulli(double p) { return SourceModel({{1.0, p}}); }

SourceModel SourceModel::paper_mixed() {
  return SourceModel({{0.5, 0.5}, {0.5, 0.75}});
}

SourceModel SourceModel::parse(const std::string& spec) {
  if (spec == "paper-mixed") return paper_mixed();
  if (spec.rfind("bernoulli:", 0) == 0)
    return bernoulli(parse_fraction(spec.substr(10), "probability"));
  if (spec.rfind("mix:", 0) == 0) {
    std::vector<MixtureComponent> components;
    for (const auto& part : split(spec.substr(4), ',')) {
      const auto fields = split(part, '*');
      if (fields.size() != 2)
        throw std::invalid_argument("source spec: component must be w*p, got '" + part + "'");
      components.push_back({parse_fraction(fields[0], "weight"),
                            parse_fraction(fields[1], "probability")});
    }
    return SourceModel(std::move(components));
  }
  throw std::invalid_argument(
      "source spec: expected 'bernoulli:p', 'mix:w1*p1,w2*p2,...' or 'paper-mixed', got '" +
      spec + "'");
}

bool SourceModel::is_paper_mixed(double tol) const {
  if (components_.size() != 2) return false;
  auto sorted = components_;
  std::sort(sorted.begin(), sorted.end(),
            [](const MixtureComponent& a, const MixtureComponent& b) { return a.p < b.p; });
  return std::abs(sorted[0].weight - 0.5) <= tol && std::abs(sorted[0].p - 0.5) <= tol &&
         std::abs(sorted[1].weight - 0.5) <= tol && std::abs(sorted[1].p - 0.75) <= tol;
}

std::string SourceModel::to_spec_string() const {
  if (is_paper_mixed(0.0)) return "paper-mixed";
  char buf[64];
  if (components_.size() == 1) {
    std::snprintf(buf, sizeof buf, "bernoulli:%.17g", components_[0].p);
    return buf;
  }
  std::string out = "mix:";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g*%.17g", components_[i].weight, components_[i].p);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

double block_log_prob(const SourceModel& model, std::int64_t k, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("block_log_prob: n must be >= 1");
  if (k < 0 || k > n) throw std::invalid_argument("block_log_prob: k must be in [0, n]");
  std::vector<double> terms;
  terms.reserve(model.components().size());
  for (const auto& c : model.components()) {
    double t = std::log2(c.weight);
    if (k > 0) t += static_cast<double>(k) * std::log2(c.p);
    if (k < n) t += static_cast<double>(n - k) * std::log2(1.0 - c.p);
    terms.push_back(t);
  }
  return log2_sum_exp2(terms);
}

TypeClassTable build_type_table(const SourceModel& model, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("build_type_table: n must be >= 1");
  TypeClassTable table;
  table.n = n;
  table.rows.resize(static_cast<std::size_t>(n) + 1);

  // Per-component log2 factors, hoisted out of the k loop.
  const auto& comps = model.components();
  std::vector<double> log2_w(comps.size()), log2_p(comps.size()), log2_q(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j) {
    log2_w[j] = std::log2(comps[j].weight);
    log2_p[j] = std::log2(comps[j].p);
    log2_q[j] = std::log2(1.0 - comps[j].p);
  }

  std::vector<double> terms(comps.size());
  for (std::int64_t k = 0; k <= n; ++k) {
    auto& row = table.rows[static_cast<std::size_t>(k)];
    row.k = k;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      double t = log2_w[j];
      if (k > 0) t += static_cast<double>(k) * log2_p[j];
      if (k < n) t += static_cast<double>(n - k) * log2_q[j];
      terms[j] = t;
    }
    row.log2_atom_prob = log2_sum_exp2(terms);
    if (n <= 64) {
      const auto c = binom_capped(n, k);
      row.exact_count = *c;
      row.count_is_exact = true;
      row.log2_count = std::log2(static_cast<double>(*c));
    } else {
      row.count_is_exact = false;
      row.log2_count = log2_binom(n, k);
    }
  }

  // Total mass in the log domain: peak-shifted compensated sum.
  double peak = kNegInf;
  for (const auto& row : table.rows) {
    const double t = row.log2_count + row.log2_atom_prob;
    if (t > peak) peak = t;
  }
  double sum = 0.0, carry = 0.0;
  for (const auto& row : table.rows) {
    const double t = row.log2_count + row.log2_atom_prob;
    if (t == kNegInf) continue;
    const double y = std::exp2(t - peak) - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  table.total_mass = std::exp2(peak) * sum;
  return table;
}

std::pair<Block, std::size_t> sample_block(const SourceModel& model,
                                           std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_block: n must be >= 1");
  const auto& comps = model.components();
  std::size_t picked = comps.size() - 1;
  const double u = rng.next_double();
  double cumulative = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    cumulative += comps[j].weight;
    if (u < cumulative) {
      picked = j;
      break;
    }
  }
  const double p = comps[picked].p;
  Block block(n);
  for (std::int64_t i = 0; i < n; ++i)
    if (rng.bernoulli(p)) block.set_bit(i, true);
  return {std::move(block), picked};
}

double top_mass(const TypeClassTable& table, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("top_mass: M must be >= 1");
  const std::int64_t n = table.n;
  if (n <= 63 && m >= (1ull << n)) return 1.0;

  std::vector<std::size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double pa = table.rows[a].log2_atom_prob, pb = table.rows[b].log2_atom_prob;
    if (pa != pb) return pa > pb;
    return a < b;
  });

  std::uint64_t remaining = m;
  double mass = 0.0, carry = 0.0;
  for (std::size_t idx : order) {
    const auto& row = table.rows[idx];
    std::uint64_t available;
    if (row.count_is_exact) {
      available = row.exact_count;
    } else {
      // Huge classes can never be wholly consumed by a 64-bit budget.
      const auto c = binom_capped(n, row.k);
      available = c ? *c : std::numeric_limits<std::uint64_t>::max();
    }
    const std::uint64_t taken = std::min(remaining, available);
    const double y = static_cast<double>(taken) * std::exp2(row.log2_atom_prob) - carry;
    const double s = mass + y;
    carry = (s - mass) - y;
    mass = s;
    remaining -= taken;
    if (remaining == 0) break;
  }
  return std::min(mass, 1.0);
}

double top_mass(const SourceModel& model, std::int64_t n, std::uint64_t m) {
  return top_mass(build_type_table(model, n), m);
}

}  // namespace rdp
