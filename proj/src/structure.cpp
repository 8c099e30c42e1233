#include "msequiv/structure.hpp"

#include "msequiv/sampling.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

namespace msequiv {

SignMatrix::SignMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

SignMatrix::SignMatrix(const std::vector<std::vector<int>>& rows) {
    rows_ = rows.size();
    cols_ = rows.empty() ? 0 : rows.front().size();
    data_.reserve(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (rows[i].size() != cols_) {
            throw InputError("sign matrix row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(cols_));
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            const int v = rows[i][j];
            if (v < -1 || v > 1) {
                throw InputError("sign matrix entry (" + std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + ") = " + std::to_string(v) +
                                 " is not in {-1, 0, +1}");
            }
            data_.push_back(v);
        }
    }
}

void SignMatrix::set(std::size_t i, std::size_t j, int sign) {
    if (sign < -1 || sign > 1) {
        throw InputError("sign matrix entries must be in {-1, 0, +1}");
    }
    data_.at(i * cols_ + j) = sign;
}

std::vector<std::vector<int>> SignMatrix::to_rows() const {
    std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out[i][j] = (*this)(i, j);
        }
    }
    return out;
}

SignMatrix load_sign_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open sign matrix file '" + path.string() + "'");
    }
    std::vector<std::vector<int>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::vector<int> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(tok, &used);
                if (used != tok.size()) {
                    throw std::invalid_argument(tok);
                }
                row.push_back(v);
            } catch (const std::logic_error&) {
                throw InputError(path.string() + ":" + std::to_string(lineno) +
                                 ": not an integer '" + tok + "'");
            }
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    SignMatrix s(rows);
    if (s.rows() != s.cols()) {
        throw InputError("sign matrix in '" + path.string() + "' is not square");
    }
    return s;
}

void save_sign_matrix(const SignMatrix& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write sign matrix file '" + path.string() + "'");
    }
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = 0; j < s.cols(); ++j) {
            out << (j ? " " : "") << (s(i, j) >= 0 ? " " : "") << s(i, j);
        }
        out << '\n';
    }
}

SignMatrix derive_sign_matrix(const OdeSystem& system, std::size_t samples, std::uint64_t seed) {
    const std::size_t n = system.dimension();
    SignMatrix signs(n, n);
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
    HaltonSequence halton(n, seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto p = scale_to_box(halton.next(), system.spec().domain);
        const Matrix jac = system.interaction_jacobian(Eigen::Map<const Vector>(p.data(), n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const int sg = (v > 0.0) - (v < 0.0);
                if (!seen[i][j]) {
                    signs.set(i, j, sg);
                    seen[i][j] = true;
                } else if (signs(i, j) != sg) {
                    throw InputError("sign of d a_" + std::to_string(i + 1) + "/d " +
                                     system.spec().variables[j] +
                                     " is not constant over the model domain");
                }
            }
        }
    }
    return signs;
}

StructureError::StructureError(std::vector<StructureViolation> violations)
    : InputError([&] {
          std::ostringstream os;
          os << "sign matrix violates the modular structure (" << violations.size()
             << " violation" << (violations.size() == 1 ? "" : "s") << ")";
          for (const auto& v : violations) {
              os << "\n  (" << v.row + 1 << "," << v.col + 1 << ") = " << v.entry << ": "
                 << v.clause;
          }
          return os.str();
      }()),
      violations_(std::move(violations)) {}

namespace {

struct AssignmentResult {
    ModuleAssignment assignment;
    std::vector<StructureViolation> violations;
};

AssignmentResult infer_assignment(const SignMatrix& s, std::size_t n) {
    if (s.rows() != s.cols()) {
        throw InputError("sign matrix must be square");
    }
    const std::size_t total = s.rows();
    if (n == 0 || n > total) {
        throw InputError("master count " + std::to_string(n) + " must lie in [1, " +
                         std::to_string(total) + "]");
    }
    AssignmentResult r;
    auto& a = r.assignment;
    a.masters = n;
    a.total = total;
    a.master_of.assign(total, std::nullopt);
    for (std::size_t k = 0; k < n; ++k) {
        a.master_of[k] = k;
    }

    for (std::size_t i = n; i < total; ++i) {
        std::vector<std::size_t> inputs;
        for (std::size_t j = 0; j < n; ++j) {
            const int e = s(i, j);
            if (e == -1) {
                r.violations.push_back(
                    {i, j, e, "module gene receives a negative input from a master"});
            } else if (e == 1) {
                inputs.push_back(j);
            }
        }
        if (inputs.size() > 1) {
            for (std::size_t j : inputs) {
                r.violations.push_back({i, j, 1, "module gene has more than one master input"});
            }
        } else if (inputs.size() == 1) {
            a.master_of[i] = inputs.front();
        }
    }

    // Genes without a direct master input join the module they are wired to.
    std::deque<std::size_t> queue;
    for (std::size_t i = n; i < total; ++i) {
        if (a.master_of[i]) {
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v = n; v < total; ++v) {
            if (!a.master_of[v] && (s(u, v) != 0 || s(v, u) != 0)) {
                a.master_of[v] = a.master_of[u];
                queue.push_back(v);
            }
        }
    }

    for (std::size_t i = n; i < total; ++i) {
        for (std::size_t j = n; j < total; ++j) {
            const int e = s(i, j);
            if (e == 0) {
                continue;
            }
            if (a.master_of[i] != a.master_of[j]) {
                r.violations.push_back({i, j, e, "interaction between different modules"});
            } else if (e == -1) {
                r.violations.push_back({i, j, e, "negative interaction inside a module"});
            }
        }
    }

    a.modules.assign(n, {});
    for (std::size_t i = n; i < total; ++i) {
        if (a.master_of[i]) {
            a.modules[*a.master_of[i]].push_back(i);
        }
    }
    return r;
}

}  // namespace

std::vector<StructureViolation> modular_structure_violations(const SignMatrix& sa_high,
                                                             std::size_t masters) {
    return infer_assignment(sa_high, masters).violations;
}

ModuleAssignment check_modular_structure(const SignMatrix& sa_high, std::size_t masters) {
    auto r = infer_assignment(sa_high, masters);
    if (!r.violations.empty()) {
        throw StructureError(std::move(r.violations));
    }
    return std::move(r.assignment);
}

int path_sign_product(const std::vector<Edge>& path, const SignMatrix& sa_high) {
    if (path.empty()) {
        throw InputError("empty path");
    }
    int sign = 1;
    for (std::size_t e = 0; e < path.size(); ++e) {
        const auto [from, to] = path[e];
        if (from >= sa_high.cols() || to >= sa_high.rows()) {
            throw InputError("path vertex out of range");
        }
        if (e > 0 && path[e - 1].second != from) {
            throw InputError("path edges do not chain at edge " + std::to_string(e + 1));
        }
        const int s = sa_high(to, from);
        if (s == 0) {
            throw InputError("path uses edge " + std::to_string(from + 1) + " -> " +
                             std::to_string(to + 1) + " with zero sign entry");
        }
        sign *= s;
    }
    return sign;
}

namespace {

/// Depth-first enumeration of simple paths source -> target whose interior
/// vertices lie in `allowed`. Stops at the first path with the wanted sign.
class PathSearch {
public:
    PathSearch(const SignMatrix& s, std::vector<bool> allowed, std::size_t cap)
        : s_(s), allowed_(std::move(allowed)), cap_(cap) {}

    std::optional<std::vector<std::size_t>> find(std::size_t source, std::size_t target, int sign) {
        path_.assign(1, source);
        visited_.assign(s_.rows(), false);
        visited_[source] = true;
        target_ = target;
        wanted_ = sign;
        found_.reset();
        dfs(source, 1);
        return found_;
    }

private:
    void dfs(std::size_t u, int sign) {
        if (found_) {
            return;
        }
        if (++count_ > cap_) {
            throw NumericalError("path enumeration cap exceeded (" + std::to_string(cap_) +
                                 " paths)");
        }
        // The direct edge into the target closes a path.
        if (const int e = s_(target_, u); e != 0 && sign * e == wanted_) {
            found_ = path_;
            found_->push_back(target_);
            return;
        }
        for (std::size_t v = 0; v < s_.rows() && !found_; ++v) {
            if (!allowed_[v] || visited_[v] || v == target_) {
                continue;
            }
            const int e = s_(v, u);
            if (e == 0) {
                continue;
            }
            visited_[v] = true;
            path_.push_back(v);
            dfs(v, sign * e);
            path_.pop_back();
            visited_[v] = false;
        }
    }

    const SignMatrix& s_;
    std::vector<bool> allowed_;
    std::size_t cap_;
    std::size_t count_ = 0;
    std::vector<std::size_t> path_;
    std::vector<bool> visited_;
    std::size_t target_ = 0;
    int wanted_ = 0;
    std::optional<std::vector<std::size_t>> found_;
};

}  // namespace

ConsistencyReport check_sign_consistency(const SignMatrix& sa_low, const SignMatrix& sa_high,
                                         const ModuleAssignment& assignment, std::size_t path_cap) {
    const std::size_t n = assignment.masters;
    const std::size_t total = assignment.total;
    if (sa_low.rows() != n || sa_low.cols() != n) {
        throw InputError("low-dimensional sign matrix must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
    if (sa_high.rows() != total || sa_high.cols() != total) {
        throw InputError("high-dimensional sign matrix does not match the assignment");
    }
    ConsistencyReport report;
    report.interpretation =
        "a nonzero low-dimensional entry (i,j) requires a simple path from master j through "
        "genes of module M_j into master i whose edge-sign product equals the entry";

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const int want = sa_low(i, j);
            if (want == 0) {
                continue;
            }
            std::vector<bool> allowed(total, false);
            for (std::size_t g : assignment.modules[j]) {
                allowed[g] = true;
            }
            PathSearch search(sa_high, std::move(allowed), path_cap);
            if (auto path = search.find(j, i, want)) {
                report.witnesses.push_back({i, j, want, std::move(*path)});
            } else {
                report.violations.push_back(
                    {i, j, j, "forward",
                     "no simple path from " + std::to_string(j + 1) + " to " +
                         std::to_string(i + 1) + " through its module has sign " +
                         (want > 0 ? "+1" : "-1")});
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t g = n; g < total; ++g) {
            if (sa_high(i, g) == 0) {
                continue;
            }
            const auto m = assignment.master_of[g];
            if (!m) {
                report.violations.push_back(
                    {i, g, g, "converse",
                     "gene " + std::to_string(g + 1) + " belongs to no module but feeds master " +
                         std::to_string(i + 1)});
            } else if (sa_low(i, *m) == 0) {
                report.violations.push_back(
                    {i, *m, g, "converse",
                     "gene " + std::to_string(g + 1) + " of module " + std::to_string(*m + 1) +
                         " feeds master " + std::to_string(i + 1) +
                         " but the low-dimensional entry is zero"});
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (sa_high(i, j) != 0 && sa_low(i, j) == 0) {
                report.warnings.push_back("direct edge " + std::to_string(j + 1) + " -> " +
                                          std::to_string(i + 1) +
                                          " has no low-dimensional counterpart");
            }
        }
    }
    return report;
}

}  // namespace msequiv
