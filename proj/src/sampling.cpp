#include "msequiv/sampling.hpp"

#include <cmath>

namespace msequiv {

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

double radical_inverse(std::uint64_t i, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (i > 0) {
        result += f * static_cast<double>(i % base);
        i /= base;
        f /= base;
    }
    return result;
}

}  // namespace

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed) {
    if (dim > std::size(kPrimes)) {
        throw InputError("Halton sequence supports at most " + std::to_string(std::size(kPrimes)) +
                         " dimensions");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    shift_.resize(dim);
    for (auto& s : shift_) {
        s = seed == 0 ? 0.0 : uni(rng);
    }
}

std::vector<double> HaltonSequence::next() {
    std::vector<double> p(shift_.size());
    for (std::size_t d = 0; d < p.size(); ++d) {
        double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
        v -= std::floor(v);
        if (v <= 0.0) {
            v = 0.5 / static_cast<double>(kPrimes[d]);
        }
        p[d] = v;
    }
    ++index_;
    return p;
}

std::vector<double> scale_to_box(const std::vector<double>& unit, const std::vector<Interval>& box) {
    std::vector<double> x(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        x[i] = box[i].lo + unit[i] * (box[i].hi - box[i].lo);
    }
    return x;
}

}  // namespace msequiv
