#ifndef EMSPLAN_CHROMOSOME_HPP
#define EMSPLAN_CHROMOSOME_HPP

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace emsplan {

/// K-bit deployment vector: bit k set means an EMS is installed on the k-th
/// candidate wall (walls in scenario file order).
struct Chromosome {
    std::vector<std::uint8_t> bits;

    Chromosome() = default;
    explicit Chromosome(std::size_t k) : bits(k, 0) {}

    std::size_t size() const { return bits.size(); }

    /// Q, the l0-norm (number of installed panels).
    int countInstalled() const {
        return std::accumulate(bits.begin(), bits.end(), 0,
                               [](int acc, std::uint8_t b) { return acc + (b ? 1 : 0); });
    }

    bool operator==(const Chromosome& o) const { return bits == o.bits; }

    std::string toString() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) {
            s.push_back(b ? '1' : '0');
        }
        return s;
    }

    static Chromosome fromString(const std::string& s) {
        Chromosome c;
        c.bits.reserve(s.size());
        for (char ch : s) {
            if (ch != '0' && ch != '1') {
                throw std::invalid_argument("chromosome: expected only '0'/'1', got '" +
                                            std::string(1, ch) + "'");
            }
            c.bits.push_back(ch == '1' ? 1 : 0);
        }
        return c;
    }
};

}  // namespace emsplan

#endif
