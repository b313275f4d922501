#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"
#include "support/oracle.hpp"
#include "viewfuse/aggregation.hpp"
#include "viewfuse/rng.hpp"
#include "viewfuse/view.hpp"

using namespace viewfuse;

namespace {

View feature_view(const std::string& id, const ProfileMap& profiles) {
  return View(id, Provenance::features, Weighting::weighted, profiles);
}

UserUniverse universe_of(std::vector<std::string> ids) {
  return UserUniverse(std::move(ids));
}

}  // namespace

TEST_CASE("similarity_vector covers exactly the other present users") {
  auto view = feature_view("v", {{"u", {{"f1", 1.0}, {"f2", 1.0}}},
                                 {"v", {{"f1", 1.0}, {"f2", 1.0}}}});
  auto sims = similarity_vector(view, "u");
  REQUIRE(sims.size() == 1);
  CHECK(sims.at("v") == Catch::Approx(1.0));

  auto three = feature_view("v", {{"u", {{"a", 1.0}}},
                                  {"v", {{"b", 1.0}}},
                                  {"w", {{"c", 1.0}}}});
  auto orthogonal = similarity_vector(three, "u");
  REQUIRE(orthogonal.size() == 2);
  CHECK(orthogonal.at("v") == 0.0);
  CHECK(orthogonal.at("w") == 0.0);

  CHECK_THROWS_AS(similarity_vector(three, "zz"), Error);
}

TEST_CASE("rank_vector ranks present targets and fills the missing-user rank") {
  SECTION("all present, sorted by descending similarity") {
    auto view = feature_view("v", {{"u", {}}, {"v", {}}, {"w", {}}, {"x", {}}});
    auto universe = universe_of({"u", "v", "w", "x"});
    std::map<std::string, double> sims{{"v", 0.9}, {"w", 0.2}, {"x", 0.5}};
    auto rv = rank_vector(sims, view, universe, "u");
    REQUIRE(rv.targets == std::vector<std::string>{"v", "w", "x"});
    CHECK(rv.ranks == std::vector<double>{1.0, 3.0, 2.0});
  }

  SECTION("absent targets share rank view-size+1, leaving a one-rank gap") {
    auto view = feature_view("v", {{"u", {}}, {"v", {}}, {"w", {}}});
    auto universe = universe_of({"u", "v", "w", "x", "y"});
    std::map<std::string, double> sims{{"v", 0.7}, {"w", 0.4}};
    auto rv = rank_vector(sims, view, universe, "u");
    REQUIRE(rv.targets == std::vector<std::string>{"v", "w", "x", "y"});
    CHECK(rv.ranks == std::vector<double>{1.0, 2.0, 4.0, 4.0});
    CHECK(std::count(rv.ranks.begin(), rv.ranks.end(), 3.0) == 0);
  }

  SECTION("similarity ties break by ascending universe index") {
    auto view = feature_view("v", {{"u", {}}, {"v", {}}, {"w", {}}});
    auto universe = universe_of({"u", "v", "w"});
    std::map<std::string, double> sims{{"v", 0.5}, {"w", 0.5}};
    auto rv = rank_vector(sims, view, universe, "u");
    CHECK(rv.ranks == std::vector<double>{1.0, 2.0});
  }

  SECTION("similarity vector must match the present set") {
    auto view = feature_view("v", {{"u", {}}, {"v", {}}, {"w", {}}});
    auto universe = universe_of({"u", "v", "w"});
    std::map<std::string, double> missing{{"v", 0.5}};
    CHECK_THROWS_AS(rank_vector(missing, view, universe, "u"), Error);
    std::map<std::string, double> foreign{{"v", 0.5}, {"w", 0.1}, {"q", 0.2}};
    CHECK_THROWS_AS(rank_vector(foreign, view, universe, "u"), Error);
  }
}

TEST_CASE("build_rank_matrix stacks unit columns, skipping absent views") {
  auto universe = universe_of({"u", "v", "w", "x"});

  SECTION("single view: normalised rank column") {
    auto view = feature_view(
        "v0", {{"u", {{"a", 1.0}}}, {"v", {{"a", 1.0}}}, {"w", {{"a", 1.0}, {"b", 2.0}}},
               {"x", {{"b", 1.0}}}});
    auto matrix = build_rank_matrix("u", {view}, universe);
    REQUIRE(matrix.columns.size() == 1);
    const double norm = std::sqrt(14.0);
    // v identical (rank 1), w shares a feature (rank 2), x orthogonal (rank 3)
    CHECK(matrix.columns[0][0] == Catch::Approx(1.0 / norm));
    CHECK(matrix.columns[0][1] == Catch::Approx(2.0 / norm));
    CHECK(matrix.columns[0][2] == Catch::Approx(3.0 / norm));
  }

  SECTION("views without the subject contribute no column") {
    auto with_u = feature_view("v0", {{"u", {}}, {"v", {}}, {"w", {}}, {"x", {}}});
    auto without_u = feature_view("v1", {{"v", {}}, {"w", {}}});
    auto also_with_u = feature_view("v2", {{"u", {}}, {"v", {}}});
    auto matrix = build_rank_matrix("u", {with_u, without_u, also_with_u}, universe);
    CHECK(matrix.columns.size() == 2);
  }

  SECTION("two views stack to two independently normalised columns") {
    // first view ranks v,w,x; second view swaps v and w
    auto first = feature_view(
        "v0", {{"u", {{"a", 1.0}}}, {"v", {{"a", 1.0}}}, {"w", {{"a", 1.0}, {"b", 2.0}}},
               {"x", {{"b", 1.0}}}});
    auto second = feature_view(
        "v1", {{"u", {{"a", 1.0}}}, {"v", {{"a", 1.0}, {"b", 2.0}}}, {"w", {{"a", 1.0}}},
               {"x", {{"b", 1.0}}}});
    auto matrix = build_rank_matrix("u", {first, second}, universe);
    REQUIRE(matrix.columns.size() == 2);
    const double norm = std::sqrt(14.0);
    CHECK(matrix.columns[0] ==
          std::vector<double>{1.0 / norm, 2.0 / norm, 3.0 / norm});
    CHECK(matrix.columns[1] ==
          std::vector<double>{2.0 / norm, 1.0 / norm, 3.0 / norm});
  }

  SECTION("column invariants: unit norm, strictly positive") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      auto instance = testinst::random_instance(rng);
      for (const auto& user : instance.universe.users()) {
        auto matrix = build_rank_matrix(user, instance.views, instance.universe);
        REQUIRE(!matrix.columns.empty());
        for (const auto& column : matrix.columns) {
          double sq = 0.0;
          for (double value : column) {
            CHECK(value > 0.0);
            sq += value * value;
          }
          CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-12);
        }
      }
    }
  }

  SECTION("a universe user present in no view is unrankable") {
    auto view = feature_view("v0", {{"u", {}}, {"v", {}}});
    auto wide = universe_of({"u", "v", "zz"});
    CHECK_THROWS_WITH(build_rank_matrix("zz", {view}, wide),
                      Catch::Matchers::ContainsSubstring("unrankable"));
  }
}

TEST_CASE("power iteration reproduces closed-form singular vectors") {
  SECTION("single unit column is returned exactly") {
    const double norm = std::sqrt(14.0);
    std::vector<std::vector<double>> columns{{1.0 / norm, 2.0 / norm, 3.0 / norm}};
    auto result = leading_left_singular_vector(columns);
    REQUIRE(result.converged);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(result.vector[r] == Catch::Approx(columns[0][r]).margin(1e-12));
    }
  }

  SECTION("worked two-column example: Perron vector (1,1,2)/sqrt(6)") {
    const double norm = std::sqrt(14.0);
    std::vector<std::vector<double>> columns{
        {1.0 / norm, 2.0 / norm, 3.0 / norm},
        {2.0 / norm, 1.0 / norm, 3.0 / norm}};
    auto result = leading_left_singular_vector(columns);
    REQUIRE(result.converged);
    const double s6 = std::sqrt(6.0);
    CHECK(std::abs(result.vector[0] - 1.0 / s6) < 1e-9);
    CHECK(std::abs(result.vector[1] - 1.0 / s6) < 1e-9);
    CHECK(std::abs(result.vector[2] - 2.0 / s6) < 1e-9);

    auto dense = oracle::dense_leading_left_singular_vector(columns);
    CHECK(oracle::cosine_between(result.vector, dense) >= 1.0 - 1e-10);
  }

  SECTION("identical columns collapse to that column") {
    std::vector<double> column{0.1, 0.7, 0.5, 0.5};
    double sq = 0.0;
    for (double value : column) sq += value * value;
    for (double& value : column) value /= std::sqrt(sq);
    std::vector<std::vector<double>> columns{column, column, column};
    auto result = leading_left_singular_vector(columns);
    REQUIRE(result.converged);
    for (std::size_t r = 0; r < column.size(); ++r) {
      CHECK(result.vector[r] == Catch::Approx(column[r]).margin(1e-10));
    }
  }

  SECTION("result is unit norm and non-negative") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
      auto instance = testinst::random_instance(rng);
      const auto& user = instance.universe.users()[0];
      auto matrix = build_rank_matrix(user, instance.views, instance.universe);
      auto result = leading_left_singular_vector(matrix.columns);
      double sq = 0.0;
      for (double value : result.vector) {
        CHECK(value >= 0.0);
        sq += value * value;
      }
      CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-9);
    }
  }

  SECTION("NaN input raises a numeric error") {
    std::vector<std::vector<double>> columns{{0.5, std::nan("")}};
    try {
      leading_left_singular_vector(columns);
      FAIL("expected numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::numeric);
    }
  }

  SECTION("hitting max-iters reports non-convergence but returns a vector") {
    const double norm = std::sqrt(14.0);
    std::vector<std::vector<double>> columns{
        {1.0 / norm, 2.0 / norm, 3.0 / norm},
        {2.0 / norm, 1.0 / norm, 3.0 / norm}};
    PowerIterationOptions tight;
    tight.max_iters = 1;
    tight.tol = 1e-16;
    auto result = leading_left_singular_vector(columns, tight);
    CHECK(!result.converged);
    CHECK(result.vector.size() == 3);
  }
}

TEST_CASE("aggregate_neighbour_set selects the smallest singular-vector entries") {
  auto universe = universe_of({"u", "v", "w", "x"});

  SECTION("single view reduces to that view's ranking") {
    RankMatrix matrix;
    matrix.subject = "u";
    matrix.targets = {"v", "w", "x"};
    const double norm = std::sqrt(14.0);
    matrix.columns = {{1.0 / norm, 2.0 / norm, 3.0 / norm}};
    CHECK(aggregate_neighbour_set(matrix, 2) ==
          std::vector<std::string>{"v", "w"});
  }

  SECTION("worked example: tie between v and w resolves by universe order") {
    RankMatrix matrix;
    matrix.subject = "u";
    matrix.targets = {"v", "w", "x"};
    const double norm = std::sqrt(14.0);
    matrix.columns = {{1.0 / norm, 2.0 / norm, 3.0 / norm},
                      {2.0 / norm, 1.0 / norm, 3.0 / norm}};
    auto set = aggregate_neighbour_set(matrix, 2);
    CHECK(set == std::vector<std::string>{"v", "w"});
    CHECK(set == oracle::neighbour_set(matrix, 2));
  }

  SECTION("identical rankings: any k returns the common top-k") {
    RankMatrix matrix;
    matrix.subject = "u";
    matrix.targets = {"v", "w", "x"};
    std::vector<double> ranks{2.0, 3.0, 1.0};
    double sq = 0.0;
    for (double value : ranks) sq += value * value;
    for (double& value : ranks) value /= std::sqrt(sq);
    matrix.columns = {ranks, ranks, ranks};
    CHECK(aggregate_neighbour_set(matrix, 1) == std::vector<std::string>{"x"});
    CHECK(aggregate_neighbour_set(matrix, 3) ==
          std::vector<std::string>{"x", "v", "w"});
    CHECK(aggregate_neighbour_set(matrix, 3) == oracle::mean_rank_neighbour_set(matrix, 3));
  }

  SECTION("k is clamped to n-1 and must be positive") {
    RankMatrix matrix;
    matrix.subject = "u";
    matrix.targets = {"v"};
    matrix.columns = {{1.0}};
    CHECK(aggregate_neighbour_set(matrix, 10) == std::vector<std::string>{"v"});
    CHECK_THROWS_AS(aggregate_neighbour_set(matrix, 0), Error);
  }
}

TEST_CASE("aggregation matches the dense SVD oracle on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    auto instance = testinst::random_instance(rng);
    const int k = 1 + static_cast<int>(rng.below(10));
    for (const auto& user : instance.universe.users()) {
      auto matrix = build_rank_matrix(user, instance.views, instance.universe);
      auto mine = aggregate_neighbour_set(matrix, k);
      auto expected = oracle::neighbour_set(matrix, k);
      REQUIRE(mine == expected);

      auto spectral = leading_left_singular_vector(matrix.columns);
      auto dense = oracle::dense_leading_left_singular_vector(matrix.columns);
      REQUIRE(oracle::cosine_between(spectral.vector, dense) >= 1.0 - 1e-8);
    }
  }
}

TEST_CASE("single-view aggregation equals view_knn for every user and k") {
  Rng rng(99);
  for (int trial = 0; trial < 15; ++trial) {
    const auto users = testinst::user_names(2 + rng.below(15));
    auto view = testinst::random_view(rng, users, "only");
    std::vector<View> views{view};
    auto universe = make_universe(views);
    const int k = 1 + static_cast<int>(rng.below(8));
    for (const auto& user : universe.users()) {
      auto matrix = build_rank_matrix(user, views, universe);
      CHECK(aggregate_neighbour_set(matrix, k) == view_knn(view, universe, user, k));
    }
  }
}

TEST_CASE("all_neighbour_sets") {
  SECTION("n=2: each user's set is the other user for any k") {
    auto view = feature_view("v0", {{"a", {{"f", 1.0}}}, {"b", {{"g", 1.0}}}});
    std::vector<View> views{view};
    auto universe = make_universe(views);
    for (int k : {1, 3, 10}) {
      auto sets = all_neighbour_sets(views, universe, k);
      CHECK(sets.neighbours_of("a") == std::vector<std::string>{"b"});
      CHECK(sets.neighbours_of("b") == std::vector<std::string>{"a"});
    }
  }

  SECTION("six users, three views, k=3: every user gets exactly 3 neighbours") {
    Rng rng(5);
    const auto users = testinst::user_names(6);
    std::vector<View> views;
    for (int j = 0; j < 3; ++j) {
      views.push_back(testinst::random_view(rng, users, "view" + std::to_string(j)));
    }
    auto universe = make_universe(views);
    auto sets = all_neighbour_sets(views, universe, 3);
    REQUIRE(sets.size() == universe.size());
    for (const auto& list : sets.lists()) {
      CHECK(list.size() == std::min<std::size_t>(3, universe.size() - 1));
    }
  }

  SECTION("random 10-user, 3-view instance equals the brute-force pipeline") {
    Rng rng(31337);
    const auto users = testinst::user_names(10);
    std::vector<View> views;
    for (int j = 0; j < 3; ++j) {
      views.push_back(testinst::random_view(rng, users, "view" + std::to_string(j)));
    }
    auto universe = make_universe(views);
    auto sets = all_neighbour_sets(views, universe, 4);
    for (const auto& user : universe.users()) {
      auto matrix = build_rank_matrix(user, views, universe);
      CHECK(sets.neighbours_of(user) == oracle::neighbour_set(matrix, 4));
    }
  }

  SECTION("out-degree bound and list hygiene") {
    Rng rng(17);
    auto instance = testinst::random_instance(rng, 20, 4);
    const int k = 1 + static_cast<int>(rng.below(10));
    auto sets = all_neighbour_sets(instance.views, instance.universe, k);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& list = sets.lists()[i];
      CHECK(list.size() ==
            std::min<std::size_t>(static_cast<std::size_t>(k),
                                  instance.universe.size() - 1));
      std::set<std::string> unique(list.begin(), list.end());
      CHECK(unique.size() == list.size());
      CHECK(unique.count(sets.subjects()[i]) == 0);
    }
  }

  SECTION("output is identical across thread counts") {
    Rng rng(23);
    auto instance = testinst::random_instance(rng, 25, 4);
    auto serial = all_neighbour_sets(instance.views, instance.universe, 5, 1);
    auto parallel = all_neighbour_sets(instance.views, instance.universe, 5, 4);
    auto wide = all_neighbour_sets(instance.views, instance.universe, 5, 8);
    CHECK(serial.to_csv() == parallel.to_csv());
    CHECK(serial.to_csv() == wide.to_csv());
  }

  SECTION("per-user failures carry the offending user id") {
    auto view = feature_view("v0", {{"a", {}}, {"b", {}}});
    std::vector<View> views{view};
    UserUniverse orphaned({"a", "b", "zz"});
    CHECK_THROWS_WITH(all_neighbour_sets(views, orphaned, 2, 2),
                      Catch::Matchers::ContainsSubstring("user 'zz'"));
  }
}

TEST_CASE("permutation equivariance under relabeling") {
  // Entry ties in the aggregated vector are structural (integer rank sums
  // collide), and the tie rule resolves them under whichever universe order
  // is in force. Equivariance therefore holds at two levels: the singular
  // vectors map entry-for-entry, and tie-free instances map list-for-list.
  Rng rng(404);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 5 + rng.below(10);
    const auto users = testinst::user_names(n);

    std::vector<View> views;
    const std::size_t l = 1 + rng.below(3);
    for (std::size_t j = 0; j < l; ++j) {
      ProfileMap profiles;
      for (std::size_t index = 0; index < n; ++index) {
        auto& features = profiles[users[index]];
        features["base"] = 0.5 + rng.unit();
        const int draws = 2 + static_cast<int>(rng.below(4));
        for (int d = 0; d < draws; ++d) {
          features["f" + std::to_string(rng.below(12))] += 0.25 + rng.unit();
        }
      }
      views.push_back(View("view" + std::to_string(j), Provenance::features,
                           Weighting::weighted, profiles));
    }
    auto universe = make_universe(views);

    // Relabel by reversing names: u00 <-> u(n-1), preserving zero padding.
    std::map<std::string, std::string> relabel;
    for (std::size_t i = 0; i < n; ++i) {
      relabel[users[i]] = testinst::user_name(n - 1 - i);
    }
    std::vector<View> relabeled;
    for (const auto& view : views) {
      ProfileMap profiles;
      for (const auto& user : view.present()) {
        profiles[relabel.at(user)] = view.profile_entries(user);
      }
      relabeled.push_back(View(view.id(), view.provenance(), view.weighting(),
                               profiles));
    }
    auto relabeled_universe = make_universe(relabeled);

    for (const auto& user : universe.users()) {
      auto matrix = build_rank_matrix(user, views, universe);
      auto other = build_rank_matrix(relabel.at(user), relabeled, relabeled_universe);
      auto mine = leading_left_singular_vector(matrix.columns).vector;
      auto theirs = leading_left_singular_vector(other.columns).vector;
      std::map<std::string, double> by_target;
      for (std::size_t r = 0; r < other.targets.size(); ++r) {
        by_target[other.targets[r]] = theirs[r];
      }
      for (std::size_t r = 0; r < matrix.targets.size(); ++r) {
        CHECK(std::abs(mine[r] - by_target.at(relabel.at(matrix.targets[r]))) <
              1e-9);
      }
    }

    // Single full-coverage view: ranks are a strict permutation, the
    // singular vector is the exact rank column, so lists map verbatim.
    std::vector<View> solo{views.front()};
    std::vector<View> solo_relabeled{relabeled.front()};
    const int k = 1 + static_cast<int>(rng.below(5));
    auto original = all_neighbour_sets(solo, universe, k);
    auto permuted = all_neighbour_sets(solo_relabeled, relabeled_universe, k);
    for (const auto& user : universe.users()) {
      const auto& list = original.neighbours_of(user);
      std::vector<std::string> mapped;
      mapped.reserve(list.size());
      for (const auto& neighbour : list) mapped.push_back(relabel.at(neighbour));
      CHECK(permuted.neighbours_of(relabel.at(user)) == mapped);
    }
  }
}

TEST_CASE("neighbour-set CSV export shape") {
  auto view = feature_view("v0", {{"a", {{"f", 1.0}}},
                                  {"b", {{"f", 1.0}}},
                                  {"c", {{"g", 1.0}}}});
  std::vector<View> views{view};
  auto universe = make_universe(views);
  auto sets = all_neighbour_sets(views, universe, 2);
  const std::string csv = sets.to_csv();
  CHECK(csv.rfind("user_id,rank,neighbour_id\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
}
