#pragma once

// Builds the high-dimensional model from a low-dimensional one:
//
//   module genes  i > n :  dx_i/dt = sum_j S_A(i,j) x_j - K_i x_i
//   master genes  i <= n:  dx_i/dt = a_i(mu_i(x)) - k_i x_i
//
// where mu_i(x) mixes the master state with gain-normalised module signals
// according to the low-dimensional sign pattern.

#include "msequiv/model.hpp"
#include "msequiv/structure.hpp"
#include "msequiv/system.hpp"

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace msequiv {

/// Linear dynamics of module M_k restricted to its genes: entries
/// S_A(l,m) - K_l delta_lm for l, m in M_k. `rates` holds K_{n+1..N}.
Matrix module_matrix(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                     std::span<const double> rates, std::size_t master);

/// Input vector (S_A(l,k))_{l in M_k}.
Vector module_input(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                    std::size_t master);

/// DC gain from master k to module gene i: e_i^T (-J)^{-1} b_k.
/// Throws InputError when the module matrix is singular.
double steady_state_gain(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                         std::span<const double> rates, std::size_t master, std::size_t gene);

/// e_i^T (lambda I - J)^{-1} b_k. Throws NumericalError when lambda is a
/// module eigenvalue.
std::complex<double> transfer_gain(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                                   std::span<const double> rates, std::size_t master,
                                   std::size_t gene, std::complex<double> lambda);

/// gamma_{i,m_i} for every state: 1 for masters, the module DC gain for
/// module genes, 0 for genes without a master.
struct GainTable {
    std::vector<double> gamma;

    [[nodiscard]] double operator[](std::size_t i) const { return gamma.at(i); }
};

/// Raised when K does not give Hurwitz modules with positive gains.
class InfeasibleGainError : public InputError {
public:
    using InputError::InputError;
};

/// Computes all gains. With `require_feasible` every module must be Hurwitz
/// and every gain strictly positive.
GainTable compute_gains(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                        std::span<const double> rates, bool require_feasible = true);

/// Supports of J_eq(i,nu) and J_neq(i,nu), stored as ascending index lists.
class IndexVectors {
public:
    IndexVectors() = default;
    IndexVectors(std::size_t masters, std::size_t total);

    [[nodiscard]] std::size_t masters() const noexcept { return n_; }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }

    [[nodiscard]] const std::vector<std::size_t>& eq(std::size_t i, std::size_t nu) const {
        return eq_.at(i * n_ + nu);
    }
    [[nodiscard]] const std::vector<std::size_t>& neq(std::size_t i, std::size_t nu) const {
        return neq_.at(i * n_ + nu);
    }
    std::vector<std::size_t>& eq(std::size_t i, std::size_t nu) { return eq_.at(i * n_ + nu); }
    std::vector<std::size_t>& neq(std::size_t i, std::size_t nu) { return neq_.at(i * n_ + nu); }

    /// Dense {0,1} forms of length N.
    [[nodiscard]] std::vector<int> eq_dense(std::size_t i, std::size_t nu) const;
    [[nodiscard]] std::vector<int> neq_dense(std::size_t i, std::size_t nu) const;

private:
    std::size_t n_ = 0;
    std::size_t total_ = 0;
    std::vector<std::vector<std::size_t>> eq_;
    std::vector<std::vector<std::size_t>> neq_;
};

IndexVectors build_index_vectors(const SignMatrix& sa_low, const SignMatrix& sa_high,
                                 const ModuleAssignment& assignment);

/// mu(x) as an n x n matrix: row i is mu_i, column nu its component. Entries
/// with S_a(i,nu) = 0 are 0. Throws InputError if a needed J_eq is empty.
Matrix auxiliary_map(const Vector& x, const SignMatrix& sa_low, const GainTable& gains,
                     const IndexVectors& index, std::span<const double> eps);

/// The same map as expressions in the high-dimensional variables.
std::vector<std::vector<Expr>> auxiliary_map_expr(const SignMatrix& sa_low, const GainTable& gains,
                                                  const IndexVectors& index,
                                                  std::span<const double> eps);

struct ConstructionOptions {
    /// Reject K that gives non-Hurwitz modules or non-positive gains.
    bool require_feasible = true;
    /// Low-dimensional sign matrix; derived from the model when absent.
    std::optional<SignMatrix> sa_low;
    std::size_t sign_samples = 256;
};

struct HighDimModel {
    ModelSpec low;
    ModelSpec spec;  // flattened, loadable; carries ConstructionInfo
    SignMatrix sa_low;
    SignMatrix sa_high;
    ModuleAssignment assignment;
    std::vector<double> rates;  // K_{n+1..N}
    std::vector<double> eps;
    GainTable gains;
    IndexVectors index;

    [[nodiscard]] OdeSystem system() const { return OdeSystem(spec); }
    [[nodiscard]] Vector lift(const Vector& z) const;
    [[nodiscard]] Matrix auxiliary(const Vector& x) const;
};

/// Steps 1-4 with fixed K and eps. Structure and sign consistency are
/// checked first; violations throw.
HighDimModel assemble_high_dim(const ModelSpec& low, const SignMatrix& sa_high,
                               std::span<const double> rates, std::span<const double> eps,
                               const ConstructionOptions& options = {});

/// h(z): masters copy z, module gene i gets gamma_i z_{m_i}, unassigned 0.
Vector lift_state(const Vector& z, const ConstructionInfo& info);

}  // namespace msequiv
