#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include "palim/parallel.hpp"

using namespace palim;

TEST(Threads, Resolution) {
  unsetenv("PALIM_THREADS");
  EXPECT_EQ(resolve_threads(3), 3);
  EXPECT_GE(resolve_threads(0), 1);
  setenv("PALIM_THREADS", "5", 1);
  EXPECT_EQ(resolve_threads(3), 5);
  setenv("PALIM_THREADS", "junk", 1);
  EXPECT_EQ(resolve_threads(2), 2);
  unsetenv("PALIM_THREADS");
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int threads : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsLowestIndex) {
  for (int threads : {1, 4}) {
    try {
      parallel_for(200, threads, [](std::size_t i) {
        if (i % 37 == 5) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "5");
    }
  }
}
