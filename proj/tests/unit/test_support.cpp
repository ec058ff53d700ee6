#include "critsense/csv.hpp"
#include "critsense/parallel.hpp"
#include "critsense/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace critsense;

TEST_CASE("seed mixing") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(trajectory_seed(20240, 3) == (20240u ^ 3u));
    CHECK(hash_seed({1, 2}) != hash_seed({2, 1}));
    NormalSource a(9), b(9), c(10);
    const double x = a();
    CHECK(x == b());
    CHECK(x != c());
}

TEST_CASE("normal source statistics") {
    NormalSource n(123);
    double s = 0, s2 = 0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double z = n();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / count) < 0.01);
    CHECK(std::abs(s2 / count - 1.0) < 0.01);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
    for (unsigned w : {1u, 4u}) {
        std::vector<int> hits(100, 0);
        parallel_for(hits.size(), w, [&](unsigned, std::size_t i) { ++hits[i]; });
        for (int h : hits) CHECK(h == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](unsigned, std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("csv output") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.23e-6) == "1.23e-06");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    const double x = 0.48090123456789;
    CHECK(std::stod(format_double(x)) == x);

    const auto path = std::filesystem::temp_directory_path() / "critsense_csv_test.csv";
    {
        CsvWriter w(path.string(), {"t", "n", "flag", "label"});
        w.row({0.5, 3, true, "a,b"});
        CHECK(w.rows_written() == 1);
        CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);
    }
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "t,n,flag,label\n0.5,3,1,\"a,b\"\n");
    std::filesystem::remove(path);
}
