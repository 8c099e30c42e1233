#pragma once

// Interaction sign matrices and the structural preconditions for building a
// high-dimensional model: masters occupy the first n indices, every other gene
// belongs to at most one master's module, modules only talk to their own
// master and to the master rows, and every low-dimensional interaction has a
// sign-consistent path through the corresponding module.

#include "msequiv/error.hpp"
#include "msequiv/system.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace msequiv {

/// Dense matrix over {-1, 0, +1}. Entry (i, j) is the sign of the influence
/// of gene j on the interaction rate of gene i.
class SignMatrix {
public:
    SignMatrix() = default;
    SignMatrix(std::size_t rows, std::size_t cols);
    explicit SignMatrix(const std::vector<std::vector<int>>& rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] int operator()(std::size_t i, std::size_t j) const { return data_.at(i * cols_ + j); }
    void set(std::size_t i, std::size_t j, int sign);

    [[nodiscard]] std::vector<std::vector<int>> to_rows() const;

    friend bool operator==(const SignMatrix&, const SignMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<int> data_;
};

/// Whitespace-separated integer rows; '#' starts a comment.
SignMatrix load_sign_matrix(const std::filesystem::path& path);
void save_sign_matrix(const SignMatrix& s, const std::filesystem::path& path);

/// sgn(dA/dx) over sampled interior points of the model domain. Throws
/// InputError when a sign is not constant across the samples.
SignMatrix derive_sign_matrix(const OdeSystem& system, std::size_t samples = 256,
                              std::uint64_t seed = 0);

/// Partition of indices n..N-1 (0-based) into modules, one per master.
struct ModuleAssignment {
    std::size_t masters = 0;
    std::size_t total = 0;
    /// master_of[i] for every state; masters map to themselves, module genes
    /// without any path to a master have no entry.
    std::vector<std::optional<std::size_t>> master_of;
    /// modules[k] lists the module genes driven by master k, ascending.
    std::vector<std::vector<std::size_t>> modules;

    [[nodiscard]] bool is_master(std::size_t i) const noexcept { return i < masters; }
};

struct StructureViolation {
    std::size_t row = 0;
    std::size_t col = 0;
    int entry = 0;
    std::string clause;
};

class StructureError : public InputError {
public:
    explicit StructureError(std::vector<StructureViolation> violations);
    [[nodiscard]] const std::vector<StructureViolation>& violations() const noexcept {
        return violations_;
    }

private:
    std::vector<StructureViolation> violations_;
};

/// Validates the modular block structure and returns the implied assignment.
/// Throws StructureError listing every offending entry.
ModuleAssignment check_modular_structure(const SignMatrix& sa_high, std::size_t masters);

/// Non-throwing variant for reports.
std::vector<StructureViolation> modular_structure_violations(const SignMatrix& sa_high,
                                                             std::size_t masters);

using Edge = std::pair<std::size_t, std::size_t>;  // (from, to), 0-based

/// Product of sign(to <- from) along a chained path. Throws InputError on a
/// broken chain or a zero entry.
int path_sign_product(const std::vector<Edge>& path, const SignMatrix& sa_high);

struct PathWitness {
    std::size_t target = 0;  // i (master receiving the interaction)
    std::size_t source = 0;  // j (master emitting it)
    int required_sign = 0;
    std::vector<std::size_t> path;  // vertices from source to target
};

struct ConsistencyViolation {
    std::size_t target = 0;
    std::size_t source = 0;
    std::size_t via = 0;  // first module gene on the offending edge (converse clause)
    std::string clause;
    std::string detail;
};

struct ConsistencyReport {
    std::string interpretation;
    std::vector<PathWitness> witnesses;
    std::vector<ConsistencyViolation> violations;
    std::vector<std::string> warnings;

    [[nodiscard]] bool consistent() const noexcept { return violations.empty(); }
};

/// Checks that every nonzero low-dimensional interaction j -> i is realised
/// by a simple path j -> (module of j)* -> i with the same sign product, and
/// that module genes only feed masters whose low-dimensional counterpart is
/// actually influenced by the module's master.
ConsistencyReport check_sign_consistency(const SignMatrix& sa_low, const SignMatrix& sa_high,
                                         const ModuleAssignment& assignment,
                                         std::size_t path_cap = 1'000'000);

}  // namespace msequiv
