#pragma once

// Sparse multivariate polynomials over named variable blocks (t, x, u).

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

enum class BlockKind { time, state, control };

std::string_view block_name(BlockKind kind);

struct VariableBlock {
  BlockKind kind;
  int dim;
};

/// Ordered collection of variable blocks. Variables are addressed by a
/// global index = block offset + coordinate. Names are `t`, `x1..xn`,
/// `u1..um`.
class VariableSpace {
 public:
  VariableSpace() = default;
  explicit VariableSpace(std::vector<VariableBlock> blocks);

  /// Convenience: [time(1)] + state(n) + control(m); blocks of size 0 omitted.
  static VariableSpace make(int state_dim, int control_dim, bool with_time = true);

  int size() const { return total_; }
  const std::vector<VariableBlock>& blocks() const { return blocks_; }

  bool has(BlockKind kind) const;
  int dim(BlockKind kind) const;
  /// Global index of the first variable of `kind`; throws if absent.
  int offset(BlockKind kind) const;
  std::vector<int> indices(BlockKind kind) const;
  BlockKind kind_of(int index) const;

  std::string name(int index) const;
  std::optional<int> index_of(std::string_view name) const;

  bool operator==(const VariableSpace& other) const;

 private:
  std::vector<VariableBlock> blocks_;
  int total_ = 0;
};

/// Dense exponent vector. Ordered graded-lex: total degree first, then the
/// exponent of the lowest-index variable decides (x1 before x2).
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(int n) : e_(static_cast<size_t>(n), 0) {}
  explicit ExponentVector(std::vector<int> e);

  static ExponentVector unit(int n, int var, int power = 1);

  int size() const { return static_cast<int>(e_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return e_[static_cast<size_t>(i)]; }
  const std::vector<int>& data() const { return e_; }

  void set(int i, int value);
  ExponentVector operator+(const ExponentVector& other) const;

  bool operator==(const ExponentVector& other) const { return e_ == other.e_; }
  bool operator<(const ExponentVector& other) const;

 private:
  std::vector<int> e_;
  int degree_ = 0;
};

/// All exponent vectors of degree <= max_degree supported on `restrict_to`
/// (all blocks when empty optional), sorted graded-lex.
std::vector<ExponentVector> enumerate_basis(const VariableSpace& space, int max_degree,
                                            std::optional<std::vector<BlockKind>> restrict_to = std::nullopt);

/// C(n + d, d) without overflow for the sizes used here.
long long basis_size(int n, int d);

class Polynomial {
 public:
  using TermMap = std::map<ExponentVector, double>;

  Polynomial() = default;
  explicit Polynomial(VariableSpace space) : space_(std::move(space)) {}

  static Polynomial constant(const VariableSpace& space, double c);
  static Polynomial variable(const VariableSpace& space, int index);
  static Polynomial monomial(const VariableSpace& space, const ExponentVector& e, double c = 1.0);

  const VariableSpace& space() const { return space_; }
  const TermMap& terms() const& { return terms_; }
  TermMap terms() && { return std::move(terms_); }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  /// Largest partial degree over the listed variables.
  int degree_in(std::span<const int> vars) const;
  bool depends_on(BlockKind kind) const;
  double coefficient(const ExponentVector& e) const;

  /// Adds c to the coefficient of e, dropping the term if it cancels.
  void add_term(const ExponentVector& e, double c);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial& operator+=(const Polynomial& other);

  bool operator==(const Polynomial& other) const;

  double evaluate(std::span<const double> point) const;

  Polynomial derivative(int var) const;
  Polynomial derivative(int var1, int var2) const;

  /// p(x) with x_i replaced by offset_i + scale_i * x_i for every variable.
  Polynomial affine_substitute(std::span<const double> offset, std::span<const double> scale) const;
  /// p with variable `var` fixed to `value` (the variable's exponent becomes 0).
  Polynomial fix_variable(int var, double value) const;
  /// Re-expresses p in `target`; `index_map[i]` is the target index of
  /// variable i. Throws if p uses a variable mapped to -1.
  Polynomial embed(const VariableSpace& target, std::span<const int> index_map) const;

  /// Text form `c * t^a x1^b u1^c + ...`. Zero prints as `0`.
  std::string to_string(int precision = 17) const;
  static Polynomial parse(std::string_view text, const VariableSpace& space);

 private:
  void require_same_space(const Polynomial& other) const;

  VariableSpace space_;
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfp
