#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "streamcover/f0_sketch.hpp"
#include "test_support.hpp"

using namespace streamcover;

namespace {

// f(x) = x over the full field: retained values are the keys themselves.
KmvSketch identity_kmv(std::size_t capacity) {
  return KmvSketch(capacity, PolyHash({0, 1}, kMersenne61, kMersenne61));
}

}  // namespace

TEST_CASE("kmv retains the smallest distinct values") {
  KmvSketch sk = identity_kmv(3);
  for (std::uint64_t key : {10ULL, 5ULL, 8ULL, 7ULL}) sk.insert(key);
  CHECK(sk.retained() == std::set<std::uint64_t>{5, 7, 8});

  sk.insert(5);  // duplicate
  CHECK(sk.retained() == std::set<std::uint64_t>{5, 7, 8});

  sk.insert(6);
  CHECK(sk.retained() == std::set<std::uint64_t>{5, 6, 7});
}

TEST_CASE("kmv saturates at its capacity") {
  KmvSketch sk = identity_kmv(400);
  for (std::uint64_t key = 0; key < 10000; ++key) sk.insert(key + 1);
  CHECK(sk.retained_count() == 400);
}

TEST_CASE("estimates are exact below capacity") {
  F0Sketch sk(0.125, 0.5, 404);
  CHECK(sk.estimate() == 0.0);
  for (std::uint64_t key = 0; key < 5; ++key) sk.insert(key * 1000 + 3);
  CHECK(sk.estimate() == 5.0);
  for (std::uint64_t key = 0; key < 5; ++key) sk.insert(key * 1000 + 3);
  CHECK(sk.estimate() == 5.0);
}

TEST_CASE("capacity and replica counts follow eps and delta") {
  F0Sketch single(0.125, 0.5, 1);
  CHECK(single.replica_count() == 1);
  CHECK(single.replica(0).capacity() == 192);

  F0Sketch med(0.125, 0.05, 1);
  CHECK(med.replica_count() == 5);

  F0Sketch boundary(0.25, 0.125, 1);
  CHECK(boundary.replica_count() == 1);
  CHECK(boundary.replica(0).capacity() == 48);
}

TEST_CASE("estimate tracks the true distinct count") {
  const std::uint64_t truth = 100000;
  int within = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    F0Sketch sk(0.1, 0.05, derive_seed(5150, trial));
    for (std::uint64_t key = 0; key < truth; ++key) sk.insert(key);
    if (std::abs(sk.estimate() - double(truth)) <= 0.10 * double(truth)) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("relative error contract at desk scale") {
  const std::uint64_t truth = 100000;
  const double eps = 0.25;
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    F0Sketch sk(eps, 0.05, derive_seed(2061, trial));
    for (std::uint64_t key = 0; key < truth; ++key) sk.insert(key);
    if (std::abs(sk.estimate() - double(truth)) > eps * double(truth)) ++failures;
  }
  CHECK(failures <= 10);  // <= 5% of 200
}

TEST_CASE("merge behaves like inserting both streams") {
  F0Sketch a(0.125, 0.5, 7);
  F0Sketch b(0.125, 0.5, 7);
  F0Sketch both(0.125, 0.5, 7);
  for (std::uint64_t key = 0; key < 5000; ++key) {
    a.insert(key);
    both.insert(key);
  }
  for (std::uint64_t key = 5000; key < 9000; ++key) {
    b.insert(key);
    both.insert(key);
  }
  const F0Sketch ab = merge(a, b);
  CHECK(ab.replica(0).retained() == both.replica(0).retained());
  CHECK(ab.estimate() == both.estimate());

  const F0Sketch ba = merge(b, a);
  CHECK(ba.replica(0).retained() == ab.replica(0).retained());

  F0Sketch empty(0.125, 0.5, 7);
  const F0Sketch ae = merge(a, empty);
  CHECK(ae.replica(0).retained() == a.replica(0).retained());
}

TEST_CASE("merge rejects mismatched sketches") {
  F0Sketch a(0.125, 0.5, 7);
  F0Sketch b(0.125, 0.5, 8);   // different hash seed
  F0Sketch c(0.25, 0.5, 7);    // different capacity
  CHECK_THROWS_AS(merge(a, b), std::invalid_argument);
  CHECK_THROWS_AS(merge(a, c), std::invalid_argument);
}

TEST_CASE("merging disjoint streams doubles the estimate") {
  const double eps = 0.125;
  int within = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    F0Sketch a(eps, 0.05, derive_seed(31337, trial));
    F0Sketch b(eps, 0.05, derive_seed(31337, trial));
    for (std::uint64_t key = 0; key < 10000; ++key) a.insert(key);
    for (std::uint64_t key = 10000; key < 20000; ++key) b.insert(key);
    if (std::abs(merge(a, b).estimate() - 20000.0) <= 2 * eps * 20000.0) ++within;
  }
  CHECK(within == 20);
}

TEST_CASE("insert order does not matter") {
  std::vector<std::uint64_t> keys;
  for (std::uint64_t key = 0; key < 3000; ++key) keys.push_back(key * 17 + 5);

  F0Sketch forward(0.125, 0.5, 99);
  for (auto k : keys) forward.insert(k);

  // deterministic shuffle
  SplitMix64 rng(1);
  for (std::size_t i = keys.size(); i > 1; --i) std::swap(keys[i - 1], keys[rng.next_below(i)]);
  F0Sketch shuffled(0.125, 0.5, 99);
  for (auto k : keys) shuffled.insert(k);

  CHECK(forward.replica(0).retained() == shuffled.replica(0).retained());
  CHECK(forward.estimate() == shuffled.estimate());
}
