#include "momentfp/polycore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mfp {

std::string_view block_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::time:
      return "time";
    case BlockKind::state:
      return "state";
    case BlockKind::control:
      return "control";
  }
  return "?";
}

VariableSpace::VariableSpace(std::vector<VariableBlock> blocks) : blocks_(std::move(blocks)) {
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim < 1) throw std::invalid_argument("variable block dimension must be positive");
    if (blocks_[i].kind == BlockKind::time && blocks_[i].dim != 1)
      throw std::invalid_argument("time block must have dimension 1");
    for (size_t j = 0; j < i; ++j)
      if (blocks_[j].kind == blocks_[i].kind)
        throw std::invalid_argument("duplicate variable block: " + std::string(block_name(blocks_[i].kind)));
    total_ += blocks_[i].dim;
  }
  if (total_ < 1) throw std::invalid_argument("variable space must have at least one variable");
}

VariableSpace VariableSpace::make(int state_dim, int control_dim, bool with_time) {
  std::vector<VariableBlock> blocks;
  if (with_time) blocks.push_back({BlockKind::time, 1});
  if (state_dim > 0) blocks.push_back({BlockKind::state, state_dim});
  if (control_dim > 0) blocks.push_back({BlockKind::control, control_dim});
  return VariableSpace(std::move(blocks));
}

bool VariableSpace::has(BlockKind kind) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const auto& b) { return b.kind == kind; });
}

int VariableSpace::dim(BlockKind kind) const {
  for (const auto& b : blocks_)
    if (b.kind == kind) return b.dim;
  return 0;
}

int VariableSpace::offset(BlockKind kind) const {
  int off = 0;
  for (const auto& b : blocks_) {
    if (b.kind == kind) return off;
    off += b.dim;
  }
  throw std::invalid_argument("variable space has no " + std::string(block_name(kind)) + " block");
}

std::vector<int> VariableSpace::indices(BlockKind kind) const {
  std::vector<int> out;
  if (!has(kind)) return out;
  const int off = offset(kind);
  for (int i = 0; i < dim(kind); ++i) out.push_back(off + i);
  return out;
}

BlockKind VariableSpace::kind_of(int index) const {
  int off = 0;
  for (const auto& b : blocks_) {
    if (index >= off && index < off + b.dim) return b.kind;
    off += b.dim;
  }
  throw std::out_of_range("variable index " + std::to_string(index) + " out of range");
}

std::string VariableSpace::name(int index) const {
  int off = 0;
  for (const auto& b : blocks_) {
    if (index >= off && index < off + b.dim) {
      switch (b.kind) {
        case BlockKind::time:
          return "t";
        case BlockKind::state:
          return "x" + std::to_string(index - off + 1);
        case BlockKind::control:
          return "u" + std::to_string(index - off + 1);
      }
    }
    off += b.dim;
  }
  throw std::out_of_range("variable index " + std::to_string(index) + " out of range");
}

std::optional<int> VariableSpace::index_of(std::string_view name) const {
  if (name == "t") {
    if (!has(BlockKind::time)) return std::nullopt;
    return offset(BlockKind::time);
  }
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'u')) return std::nullopt;
  const BlockKind kind = name[0] == 'x' ? BlockKind::state : BlockKind::control;
  int k = 0;
  for (char c : name.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    k = k * 10 + (c - '0');
    if (k > 1000) return std::nullopt;
  }
  if (name[1] == '0' || k < 1 || k > dim(kind)) return std::nullopt;
  return offset(kind) + k - 1;
}

bool VariableSpace::operator==(const VariableSpace& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].kind != other.blocks_[i].kind || blocks_[i].dim != other.blocks_[i].dim) return false;
  return true;
}

// ---------------------------------------------------------------------------

ExponentVector::ExponentVector(std::vector<int> e) : e_(std::move(e)) {
  for (int v : e_) {
    if (v < 0) throw std::invalid_argument("negative exponent");
    degree_ += v;
  }
}

ExponentVector ExponentVector::unit(int n, int var, int power) {
  ExponentVector e(n);
  e.set(var, power);
  return e;
}

void ExponentVector::set(int i, int value) {
  if (value < 0) throw std::invalid_argument("negative exponent");
  auto& slot = e_.at(static_cast<size_t>(i));
  degree_ += value - slot;
  slot = value;
}

ExponentVector ExponentVector::operator+(const ExponentVector& other) const {
  if (other.e_.size() != e_.size()) throw std::invalid_argument("exponent length mismatch");
  ExponentVector out(*this);
  for (size_t i = 0; i < e_.size(); ++i) out.e_[i] += other.e_[i];
  out.degree_ += other.degree_;
  return out;
}

bool ExponentVector::operator<(const ExponentVector& other) const {
  if (degree_ != other.degree_) return degree_ < other.degree_;
  // Same degree: larger leading exponent sorts first, so x1 precedes x2.
  return std::lexicographical_compare(other.e_.begin(), other.e_.end(), e_.begin(), e_.end());
}

long long basis_size(int n, int d) {
  long long r = 1;
  for (int k = 1; k <= d; ++k) r = r * (n + k) / k;
  return r;
}

std::vector<ExponentVector> enumerate_basis(const VariableSpace& space, int max_degree,
                                            std::optional<std::vector<BlockKind>> restrict_to) {
  if (max_degree < 0) throw std::invalid_argument("max_degree must be non-negative");
  std::vector<int> vars;
  if (!restrict_to) {
    for (int i = 0; i < space.size(); ++i) vars.push_back(i);
  } else {
    for (int i = 0; i < space.size(); ++i)
      if (std::find(restrict_to->begin(), restrict_to->end(), space.kind_of(i)) != restrict_to->end())
        vars.push_back(i);
  }
  const int n = space.size();
  std::vector<ExponentVector> out;
  out.reserve(static_cast<size_t>(basis_size(static_cast<int>(vars.size()), max_degree)));
  // Per degree, distribute exponents with the first variable taking the most.
  std::vector<int> e(static_cast<size_t>(n), 0);
  std::function<void(size_t, int)> fill = [&](size_t pos, int remaining) {
    if (pos + 1 == vars.size()) {
      e[static_cast<size_t>(vars[pos])] = remaining;
      out.emplace_back(e);
      e[static_cast<size_t>(vars[pos])] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[static_cast<size_t>(vars[pos])] = k;
      fill(pos + 1, remaining - k);
    }
    e[static_cast<size_t>(vars[pos])] = 0;
  };
  out.emplace_back(n);
  if (vars.empty()) return out;
  for (int deg = 1; deg <= max_degree; ++deg) fill(0, deg);
  return out;
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(const VariableSpace& space, double c) {
  Polynomial p(space);
  p.add_term(ExponentVector(space.size()), c);
  return p;
}

Polynomial Polynomial::variable(const VariableSpace& space, int index) {
  if (index < 0 || index >= space.size()) throw std::out_of_range("variable index out of range");
  Polynomial p(space);
  p.add_term(ExponentVector::unit(space.size(), index), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const VariableSpace& space, const ExponentVector& e, double c) {
  if (e.size() != space.size()) throw std::invalid_argument("exponent length does not match space");
  Polynomial p(space);
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

int Polynomial::degree_in(std::span<const int> vars) const {
  int best = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int v : vars) d += e[v];
    best = std::max(best, d);
  }
  return best;
}

bool Polynomial::depends_on(BlockKind kind) const {
  const auto idx = space_.indices(kind);
  return degree_in(idx) > 0;
}

double Polynomial::coefficient(const ExponentVector& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const ExponentVector& e, double c) {
  if (e.size() != space_.size()) throw std::invalid_argument("exponent length does not match space");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::require_same_space(const Polynomial& other) const {
  if (!(space_ == other.space_)) throw std::invalid_argument("polynomial variable spaces differ");
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out(*this);
  out += other;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_space(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  require_same_space(other);
  Polynomial out(space_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : other.terms_) out.add_term(e1 + e2, c1 * c2);
  return out;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(space_);
  if (s == 0.0) return out;
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return space_ == other.space_ && terms_ == other.terms_;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != space_.size())
    throw std::invalid_argument("evaluation point has length " + std::to_string(point.size()) + ", expected " +
                                std::to_string(space_.size()));
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) m *= point[static_cast<size_t>(i)];
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= space_.size()) throw std::out_of_range("derivative variable out of range");
  Polynomial out(space_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    ExponentVector d(e);
    d.set(var, e[var] - 1);
    out.add_term(d, c * e[var]);
  }
  return out;
}

Polynomial Polynomial::derivative(int var1, int var2) const { return derivative(var1).derivative(var2); }

Polynomial Polynomial::affine_substitute(std::span<const double> offset, std::span<const double> scale) const {
  const int n = space_.size();
  if (static_cast<int>(offset.size()) != n || static_cast<int>(scale.size()) != n)
    throw std::invalid_argument("affine substitution length mismatch");
  // Cache (offset_i + scale_i x_i)^k per variable.
  std::vector<std::vector<Polynomial>> powers(static_cast<size_t>(n));
  const int deg = degree();
  for (int i = 0; i < n; ++i) {
    Polynomial lin = Polynomial::constant(space_, offset[static_cast<size_t>(i)]) +
                     Polynomial::variable(space_, i) * scale[static_cast<size_t>(i)];
    auto& pw = powers[static_cast<size_t>(i)];
    pw.push_back(Polynomial::constant(space_, 1.0));
    for (int k = 1; k <= deg; ++k) pw.push_back(pw.back() * lin);
  }
  Polynomial out(space_);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(space_, c);
    for (int i = 0; i < n; ++i)
      if (e[i] > 0) term = term * powers[static_cast<size_t>(i)][static_cast<size_t>(e[i])];
    out += term;
  }
  return out;
}

Polynomial Polynomial::fix_variable(int var, double value) const {
  if (var < 0 || var >= space_.size()) throw std::out_of_range("variable index out of range");
  Polynomial out(space_);
  for (const auto& [e, c] : terms_) {
    ExponentVector r(e);
    r.set(var, 0);
    out.add_term(r, c * std::pow(value, e[var]));
  }
  return out;
}

Polynomial Polynomial::embed(const VariableSpace& target, std::span<const int> index_map) const {
  if (static_cast<int>(index_map.size()) != space_.size()) throw std::invalid_argument("index map length mismatch");
  Polynomial out(target);
  for (const auto& [e, c] : terms_) {
    ExponentVector r(target.size());
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      const int j = index_map[static_cast<size_t>(i)];
      if (j < 0 || j >= target.size())
        throw std::invalid_argument("polynomial uses variable " + space_.name(i) + " absent from target space");
      r.set(j, r[j] + e[i]);
    }
    out.add_term(r, c);
  }
  return out;
}

}  // namespace mfp
