// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace ballstar {

/// Axis-aligned box, one [low, high] interval per dimension.
struct Bounds {
    std::vector<double> low;
    std::vector<double> high;

    std::size_t dim() const { return low.size(); }
    bool operator==(const Bounds&) const = default;
};

inline Bounds bounding_box(const Dataset& data) {
    if (data.empty()) throw std::invalid_argument("bounding_box: empty dataset");
    Bounds b{Point(data[0].begin(), data[0].end()), Point(data[0].begin(), data[0].end())};
    for (Index i = 1; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            b.low[j] = std::min(b.low[j], data[i][j]);
            b.high[j] = std::max(b.high[j], data[i][j]);
        }
    }
    return b;
}

enum class Family { latin_center, highleyman, lithuanian, sobol, csv };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::latin_center: return "latin_center";
        case Family::highleyman: return "highleyman";
        case Family::lithuanian: return "lithuanian";
        case Family::sobol: return "sobol";
        case Family::csv: return "csv";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "latin_center" || s == "latin-center" || s == "latin") return Family::latin_center;
    if (s == "highleyman") return Family::highleyman;
    if (s == "lithuanian") return Family::lithuanian;
    if (s == "sobol") return Family::sobol;
    if (s == "csv") return Family::csv;
    throw std::invalid_argument("unknown dataset family: " + s);
}

struct UnsupportedDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Latin-centre design: coordinate j of point i is (perm_j(i) + 0.5) / n.
inline Dataset gen_latin_center(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n < 1 || dim < 1) throw std::invalid_argument("gen_latin_center: n and dim must be >= 1");
    Rng rng(seed);
    std::vector<double> coords(n * dim);
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        for (std::size_t i = 0; i < n; ++i) {
            coords[i * dim + j] = (static_cast<double>(perm[i]) + 0.5) / static_cast<double>(n);
        }
    }
    return Dataset(dim, std::move(coords));
}

/**
 * Two 2-D Gaussian classes of equal size (first half A, second half B):
 *   A ~ N((1, 1), diag(1, 0.25)),  B ~ N((2, 0), diag(0.01, 4)).
 */
inline Dataset gen_highleyman(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_highleyman: n must be >= 2");
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(2 * n);
    const std::size_t class_a = (n + 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < class_a) {
            coords.push_back(rng.gaussian(1.0, 1.0));
            coords.push_back(rng.gaussian(1.0, 0.5));
        } else {
            coords.push_back(rng.gaussian(2.0, 0.1));
            coords.push_back(rng.gaussian(0.0, 2.0));
        }
    }
    return Dataset(2, std::move(coords));
}

/**
 * Two interleaved half-moon classes of equal size with angle theta uniform on
 * [0, pi) and isotropic N(0, 1) noise:
 *   A = 5 (cos theta, sin theta),  B = (5, -2) - 5 (cos theta, sin theta).
 */
inline Dataset gen_lithuanian(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_lithuanian: n must be >= 2");
    constexpr double radius = 5.0;
    constexpr double noise = 1.0;
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(2 * n);
    const std::size_t class_a = (n + 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * rng.uniform01();
        double x = radius * std::cos(theta);
        double y = radius * std::sin(theta);
        if (i >= class_a) {
            x = 5.0 - x;
            y = -2.0 - y;
        }
        coords.push_back(x + noise * rng.gaussian());
        coords.push_back(y + noise * rng.gaussian());
    }
    return Dataset(2, std::move(coords));
}

namespace detail {

struct SobolPolynomial {
    unsigned degree;
    unsigned coefficients;
    std::array<std::uint32_t, 5> initial;
};

// Joe & Kuo direction numbers (new-joe-kuo-6.21201) for dimensions 2..8.
inline constexpr std::array<SobolPolynomial, 7> sobol_polynomials{{
    {1, 0, {1, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0}},
    {4, 4, {1, 3, 5, 13, 0}},
    {5, 2, {1, 1, 5, 5, 17}},
}};

inline constexpr unsigned sobol_bits = 32;

inline std::array<std::uint32_t, sobol_bits + 1> sobol_directions(std::size_t dimension) {
    std::array<std::uint32_t, sobol_bits + 1> v{};
    if (dimension == 0) {
        for (unsigned i = 1; i <= sobol_bits; ++i) v[i] = 1u << (sobol_bits - i);
        return v;
    }
    const auto& poly = sobol_polynomials[dimension - 1];
    const unsigned s = poly.degree;
    for (unsigned i = 1; i <= std::min(s, sobol_bits); ++i) v[i] = poly.initial[i - 1] << (sobol_bits - i);
    for (unsigned i = s + 1; i <= sobol_bits; ++i) {
        v[i] = v[i - s] ^ (v[i - s] >> s);
        for (unsigned k = 1; k < s; ++k) {
            v[i] ^= ((poly.coefficients >> (s - 1 - k)) & 1u) * v[i - k];
        }
    }
    return v;
}

inline unsigned rightmost_zero_bit(std::uint64_t i) {
    unsigned c = 1;
    while (i & 1u) {
        i >>= 1;
        ++c;
    }
    return c;
}

}  // namespace detail

/// First n points of the unscrambled base-2 Sobol sequence in Gray-code order.
inline Dataset gen_sobol(std::size_t n, std::size_t dim) {
    if (dim < 1 || dim > 8) {
        throw UnsupportedDimension("gen_sobol: supported dimensions are 1..8, got " + std::to_string(dim));
    }
    if (n < 1) throw std::invalid_argument("gen_sobol: n must be >= 1");
    if (n > (std::size_t{1} << detail::sobol_bits)) throw std::invalid_argument("gen_sobol: n exceeds 2^32");

    std::vector<std::array<std::uint32_t, detail::sobol_bits + 1>> directions;
    for (std::size_t j = 0; j < dim; ++j) directions.push_back(detail::sobol_directions(j));

    std::vector<double> coords(n * dim, 0.0);
    std::vector<std::uint32_t> state(dim, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const unsigned c = detail::rightmost_zero_bit(i - 1);
        for (std::size_t j = 0; j < dim; ++j) {
            state[j] ^= directions[j][c];
            coords[i * dim + j] = static_cast<double>(state[j]) * 0x1.0p-32;
        }
    }
    return Dataset(dim, std::move(coords));
}

/// n i.i.d. uniform points in the box; every interval must have low < high.
inline Dataset gen_uniform_queries(std::size_t n, const Bounds& bounds, std::uint64_t seed) {
    if (bounds.low.empty() || bounds.low.size() != bounds.high.size()) {
        throw std::invalid_argument("gen_uniform_queries: malformed bounds");
    }
    for (std::size_t j = 0; j < bounds.dim(); ++j) {
        if (!(bounds.low[j] < bounds.high[j]) || !std::isfinite(bounds.low[j]) || !std::isfinite(bounds.high[j])) {
            throw std::invalid_argument("gen_uniform_queries: bounds require low < high in every dimension");
        }
    }
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(n * bounds.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < bounds.dim(); ++j) coords.push_back(rng.uniform(bounds.low[j], bounds.high[j]));
    }
    return Dataset(bounds.dim(), std::move(coords));
}

/// Queries over the dataset's own bounding box. A flat dimension is widened to
/// a unit interval around its value.
inline Dataset gen_uniform_queries(std::size_t n, const Dataset& target, std::uint64_t seed) {
    Bounds box = bounding_box(target);
    for (std::size_t j = 0; j < box.dim(); ++j) {
        if (!(box.low[j] < box.high[j])) {
            box.low[j] -= 0.5;
            box.high[j] += 0.5;
        }
    }
    return gen_uniform_queries(n, box, seed);
}

/// Keeps n distinct rows chosen uniformly at random, in their original order.
inline Dataset sample_rows(const Dataset& data, std::size_t n, std::uint64_t seed) {
    if (n >= data.size()) return data;
    Rng rng(seed);
    std::vector<Index> rows(data.size());
    for (Index i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t i = 0; i < n; ++i) std::swap(rows[i], rows[i + rng.below(rows.size() - i)]);
    rows.resize(n);
    std::sort(rows.begin(), rows.end());
    std::vector<double> coords;
    coords.reserve(n * data.dim());
    for (Index i : rows) coords.insert(coords.end(), data[i].begin(), data[i].end());
    return Dataset(data.dim(), std::move(coords));
}

struct CsvParseError : std::runtime_error {
    std::size_t line;
    CsvParseError(std::size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct CsvOptions {
    bool skip_header = false;
    std::vector<std::size_t> columns;  // empty: all columns

    bool operator==(const CsvOptions&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in, const CsvOptions& options = {}) {
    std::vector<double> coords;
    std::size_t dim = 0;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool header_pending = options.skip_header;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (width == 0) {
            width = fields.size();
            for (std::size_t c : options.columns) {
                if (c >= width) throw CsvParseError(line_no, "column " + std::to_string(c) + " out of range");
            }
            dim = options.columns.empty() ? width : options.columns.size();
        } else if (fields.size() != width) {
            throw CsvParseError(line_no, "expected " + std::to_string(width) + " fields, found " +
                                             std::to_string(fields.size()));
        }
        auto take = [&](std::size_t c) {
            const auto field = fields[c];
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
                throw CsvParseError(line_no, "non-numeric value '" + std::string(field) + "' in column " +
                                                 std::to_string(c));
            }
            coords.push_back(value);
        };
        if (options.columns.empty()) {
            for (std::size_t c = 0; c < width; ++c) take(c);
        } else {
            for (std::size_t c : options.columns) take(c);
        }
    }
    if (dim == 0) return Dataset{};
    return Dataset(dim, std::move(coords));
}

inline Dataset load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_csv(in, options);
}

/// One row per point, values printed with 17 significant digits.
inline void write_csv(const Dataset& data, std::ostream& out) {
    char buf[32];
    for (Index i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data[i][j]);
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

inline void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(data, out);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

struct GenSpec {
    Family family = Family::sobol;
    std::size_t n = 1000;
    std::size_t dim = 2;
    std::uint64_t seed = 1;
    std::string path;                 // csv only
    CsvOptions csv;                   // csv only
    std::optional<std::size_t> sample;  // csv only: keep this many random rows

    bool operator==(const GenSpec&) const = default;
};

inline Dataset generate(const GenSpec& spec) {
    switch (spec.family) {
        case Family::latin_center: return gen_latin_center(spec.n, spec.dim, spec.seed);
        case Family::highleyman:
            if (spec.dim != 2) throw UnsupportedDimension("highleyman is 2-dimensional");
            return gen_highleyman(spec.n, spec.seed);
        case Family::lithuanian:
            if (spec.dim != 2) throw UnsupportedDimension("lithuanian is 2-dimensional");
            return gen_lithuanian(spec.n, spec.seed);
        case Family::sobol: return gen_sobol(spec.n, spec.dim);
        case Family::csv: {
            Dataset data = load_csv(spec.path, spec.csv);
            if (spec.sample) data = sample_rows(data, *spec.sample, spec.seed);
            return data;
        }
    }
    throw std::invalid_argument("generate: unknown family");
}

}  // namespace ballstar
