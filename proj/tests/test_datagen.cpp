#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <ballstar/ballstar.hpp>

#include "eigen_oracle.hpp"

using namespace ballstar;

namespace {

struct Moments {
    double mean[2] = {0, 0};
    double var[2] = {0, 0};
};

Moments moments(const Dataset& d, std::size_t begin, std::size_t end) {
    Moments m;
    const double n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i)
        for (int j = 0; j < 2; ++j) m.mean[j] += d[i][j] / n;
    for (std::size_t i = begin; i < end; ++i)
        for (int j = 0; j < 2; ++j) m.var[j] += std::pow(d[i][j] - m.mean[j], 2) / n;
    return m;
}

// Base-2 radical inverse of the Gray code of i.
double gray_van_der_corput(std::uint64_t i) {
    std::uint64_t g = i ^ (i >> 1);
    double v = 0.0, scale = 0.5;
    while (g) {
        if (g & 1) v += scale;
        g >>= 1;
        scale /= 2;
    }
    return v;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ballstar_test_" + name)).string();
}

}  // namespace

TEST(LatinCenter, TwoPoints) {
    const Dataset d = gen_latin_center(2, 1, 9);
    std::vector<double> v{d[0][0], d[1][0]};
    std::sort(v.begin(), v.end());
    EXPECT_EQ(v, (std::vector<double>{0.25, 0.75}));
}

TEST(LatinCenter, OnePointPerBin) {
    const std::size_t n = 100;
    const Dataset d = gen_latin_center(n, 2, 3);
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<int> bins(n, 0);
        for (std::size_t i = 0; i < n; ++i) ++bins[static_cast<std::size_t>(std::floor(d[i][j] * n))];
        for (int b : bins) EXPECT_EQ(b, 1);
    }
    EXPECT_EQ(gen_latin_center(n, 2, 3), d);
    EXPECT_NE(gen_latin_center(n, 2, 4), d);
}

TEST(Highleyman, ClassStatistics) {
    const std::size_t n = 100000;
    const Dataset d = gen_highleyman(n, 5);
    const auto a = moments(d, 0, n / 2);
    const auto b = moments(d, n / 2, n);
    const double half = n / 2.0;
    EXPECT_NEAR(a.mean[0], 1.0, 4 * 1.0 / std::sqrt(half));
    EXPECT_NEAR(a.mean[1], 1.0, 4 * 0.5 / std::sqrt(half));
    EXPECT_NEAR(b.mean[0], 2.0, 4 * 0.1 / std::sqrt(half));
    EXPECT_NEAR(b.mean[1], 0.0, 4 * 2.0 / std::sqrt(half));
    EXPECT_NEAR(b.var[0], 0.01, 0.2 * 0.01);
    EXPECT_NEAR(a.var[0], 1.0, 0.05);
    EXPECT_NEAR(a.var[1], 0.25, 0.05 * 0.25);
    EXPECT_NEAR(b.var[1], 4.0, 0.05 * 4.0);
    EXPECT_EQ(gen_highleyman(1000, 5), gen_highleyman(1000, 5));
    EXPECT_THROW(gen_highleyman(1, 5), std::invalid_argument);
}

TEST(Lithuanian, RadialBandAndElongation) {
    const std::size_t n = 10000;
    const Dataset d = gen_lithuanian(n, 6);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double r = std::hypot(d[i][0], d[i][1]);
        inside += (r >= 1.0 && r <= 9.0);
    }
    EXPECT_GE(inside, static_cast<std::size_t>(0.99 * (n / 2)));
    const auto p = oracle::principal(d);
    EXPECT_GT(p.lambda1, p.lambda2);
    EXPECT_EQ(gen_lithuanian(1000, 6), gen_lithuanian(1000, 6));
}

TEST(Sobol, FirstDimensionIsGrayVanDerCorput) {
    const Dataset d = gen_sobol(4096, 1);
    const std::vector<double> head{0, 0.5, 0.75, 0.25, 0.375, 0.875};
    for (std::size_t i = 0; i < head.size(); ++i) EXPECT_EQ(d[i][0], head[i]);
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_EQ(d[i][0], gray_van_der_corput(i)) << i;
}

TEST(Sobol, DyadicIntervalsAndRange) {
    const Dataset d = gen_sobol(1024, 8);
    for (std::size_t k = 0; k <= 10; ++k) {
        const std::size_t m = std::size_t{1} << k;
        for (std::size_t j = 0; j < 8; ++j) {
            std::vector<int> bins(m, 0);
            for (std::size_t i = 0; i < m; ++i) ++bins[static_cast<std::size_t>(d[i][j] * m)];
            for (int b : bins) ASSERT_EQ(b, 1) << "k=" << k << " dim=" << j;
        }
    }
    for (double c : d.coords()) {
        EXPECT_GE(c, 0.0);
        EXPECT_LT(c, 1.0);
    }
}

TEST(Sobol, ReferenceValues) {
    // Joe-Kuo direction numbers, Gray-code ordering (matches scipy.stats.qmc.Sobol unscrambled).
    const Dataset d = gen_sobol(1001, 8);
    const std::vector<std::vector<double>> head{
        {0, 0, 0, 0, 0, 0, 0, 0},
        {.5, .5, .5, .5, .5, .5, .5, .5},
        {.75, .25, .25, .25, .75, .75, .25, .75},
        {.25, .75, .75, .75, .25, .25, .75, .25},
        {.375, .375, .625, .875, .375, .125, .375, .875},
        {.875, .875, .125, .375, .875, .625, .875, .375},
        {.625, .125, .875, .625, .625, .875, .125, .125},
        {.125, .625, .375, .125, .125, .375, .625, .625},
    };
    for (std::size_t i = 0; i < head.size(); ++i)
        for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(d[i][j], head[i][j]) << i << "," << j;
    const std::vector<double> p777{0.6923828125, 0.9365234375, 0.1630859375, 0.2744140625,
                                   0.6357421875, 0.3564453125, 0.1904296875, 0.7626953125};
    const std::vector<double> p1000{0.2197265625, 0.0966796875, 0.5185546875, 0.6767578125,
                                    0.2802734375, 0.9072265625, 0.0458984375, 0.8994140625};
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_EQ(d[777][j], p777[j]);
        EXPECT_EQ(d[1000][j], p1000[j]);
    }
}

TEST(Sobol, UnsupportedDimension) {
    EXPECT_THROW(gen_sobol(10, 9), UnsupportedDimension);
    EXPECT_THROW(gen_sobol(10, 0), UnsupportedDimension);
    GenSpec spec;
    spec.family = Family::highleyman;
    spec.dim = 3;
    EXPECT_THROW(generate(spec), UnsupportedDimension);
}

TEST(UniformQueries, MeanAndBounds) {
    const Bounds unit{{0, 0}, {1, 1}};
    const Dataset q = gen_uniform_queries(10000, unit, 17);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        ASSERT_GE(q[i][0], 0.0);
        ASSERT_LT(q[i][0], 1.0);
        ASSERT_GE(q[i][1], 0.0);
        ASSERT_LT(q[i][1], 1.0);
        mx += q[i][0] / 1e4;
        my += q[i][1] / 1e4;
    }
    EXPECT_NEAR(mx, 0.5, 0.02);
    EXPECT_NEAR(my, 0.5, 0.02);
    EXPECT_EQ(gen_uniform_queries(100, unit, 17), gen_uniform_queries(100, unit, 17));
    EXPECT_THROW(gen_uniform_queries(10, Bounds{{0, 1}, {1, 1}}, 1), std::invalid_argument);
    EXPECT_THROW(gen_uniform_queries(10, Bounds{{0}, {1, 1}}, 1), std::invalid_argument);
}

TEST(UniformQueries, DefaultBoxIsDataExtent) {
    const Dataset data = Dataset::from_points({{-1, 5}, {3, 5}, {0, 5}});
    const Dataset q = gen_uniform_queries(500, data, 2);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_GE(q[i][0], -1.0);
        EXPECT_LT(q[i][0], 3.0);
        EXPECT_GE(q[i][1], 4.5);  // flat dimension widened
        EXPECT_LT(q[i][1], 5.5);
    }
}

TEST(SampleRows, KeepsOrderAndCount) {
    const Dataset data = gen_latin_center(200, 1, 1);
    const Dataset s = sample_rows(data, 50, 3);
    ASSERT_EQ(s.size(), 50u);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        while (cursor < data.size() && data[cursor][0] != s[i][0]) ++cursor;
        ASSERT_LT(cursor, data.size());
    }
    EXPECT_EQ(sample_rows(data, 500, 3), data);
}

TEST(Csv, Parse) {
    std::istringstream in("1.0,2.0\n3.0,4.0\n");
    const Dataset d = parse_csv(in);
    EXPECT_EQ(d, Dataset::from_points({{1, 2}, {3, 4}}));
}

TEST(Csv, HeaderAndColumns) {
    std::istringstream in("r,g,b,label\n10, 20, 30, skin\n\n40,50,60,other\n");
    CsvOptions opts;
    opts.skip_header = true;
    opts.columns = {0, 1, 2};
    const Dataset d = parse_csv(in, opts);
    EXPECT_EQ(d, Dataset::from_points({{10, 20, 30}, {40, 50, 60}}));
}

TEST(Csv, ErrorsCarryLineNumbers) {
    std::istringstream ragged("1,2\n3,4\n5\n");
    try {
        parse_csv(ragged);
        FAIL() << "expected a parse error";
    } catch (const CsvParseError& e) {
        EXPECT_EQ(e.line, 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    std::istringstream bad("1,2\nx,4\n");
    try {
        parse_csv(bad);
        FAIL() << "expected a parse error";
    } catch (const CsvParseError& e) {
        EXPECT_EQ(e.line, 2u);
    }
    std::istringstream header("a,b\n1,2\n");
    EXPECT_THROW(parse_csv(header), CsvParseError);
    EXPECT_THROW(load_csv("/nonexistent/ballstar.csv"), std::runtime_error);
}

TEST(Csv, RoundTrip) {
    const Dataset data = gen_highleyman(500, 8);
    const std::string path = temp_path("roundtrip.csv");
    write_csv(data, path);
    EXPECT_EQ(load_csv(path), data);
    std::remove(path.c_str());
}

TEST(Generate, PureFunctionOfSpec) {
    for (Family f : {Family::latin_center, Family::highleyman, Family::lithuanian, Family::sobol}) {
        GenSpec spec;
        spec.family = f;
        spec.n = 777;
        spec.seed = 99;
        const Dataset a = generate(spec), b = generate(spec);
        EXPECT_EQ(a, b);
        EXPECT_EQ(a.size(), 777u);
        for (double c : a.coords()) EXPECT_TRUE(std::isfinite(c));
        EXPECT_EQ(family_from_string(to_string(f)), f);
    }
}
