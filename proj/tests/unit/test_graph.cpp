#include <doctest.h>

#include <unistd.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "progle/errors.hpp"
#include "progle/graph.hpp"

using namespace progle;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("progle_graph_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("load_edge_list: triangle") {
  TempFile f("0 1\n1 2\n0 2\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.graph.n == 3);
  CHECK(loaded.graph.adjacency.nnz() == 6);
  for (int i = 0; i < 3; ++i) CHECK(loaded.graph.degree[i] == doctest::Approx(2.0));
}

TEST_CASE("load_edge_list: single edge") {
  TempFile f("0 1\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.graph.n == 2);
  CHECK(loaded.graph.degree[0] == doctest::Approx(1.0));
  CHECK(loaded.graph.degree[1] == doctest::Approx(1.0));
}

TEST_CASE("load_edge_list: duplicate edges sum") {
  TempFile f("0 1\n0 1\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.graph.adjacency.coeff(0, 1) == doctest::Approx(2.0));
  CHECK(loaded.graph.adjacency.coeff(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("load_edge_list: comments, blank lines, weights") {
  TempFile f("# a comment\n\na b 2.5\nb c 0.5\n");
  const auto loaded = load_edge_list(f.path.string(), true);
  CHECK(loaded.graph.n == 3);
  CHECK(loaded.ids.find("a") == 0);
  CHECK(loaded.ids.find("b") == 1);
  CHECK(loaded.ids.find("c") == 2);
  CHECK(loaded.graph.adjacency.coeff(0, 1) == doctest::Approx(2.5));
  CHECK(loaded.graph.degree[1] == doctest::Approx(3.0));
}

TEST_CASE("load_edge_list: first-appearance ordering") {
  TempFile f("5 3\n3 7\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.ids.find("5") == 0);
  CHECK(loaded.ids.find("3") == 1);
  CHECK(loaded.ids.find("7") == 2);
}

TEST_CASE("load_edge_list: errors carry line numbers") {
  SUBCASE("malformed line") {
    TempFile f("0 1\n0 1 2 3\n");
    CHECK_THROWS_WITH_AS(load_edge_list(f.path.string(), false),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("bad weight token") {
    TempFile f("0 1 abc\n");
    CHECK_THROWS_AS(load_edge_list(f.path.string(), true), ParseError);
  }
  SUBCASE("non-positive weight") {
    TempFile f("0 1 -3\n");
    CHECK_THROWS_AS(load_edge_list(f.path.string(), true), ValidationError);
  }
  SUBCASE("weighted load without weight column") {
    TempFile f("0 1\n");
    CHECK_THROWS_AS(load_edge_list(f.path.string(), true), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_edge_list("/nonexistent/progle/path", false), ParseError);
  }
}

TEST_CASE("load_edge_list: node-count header keeps isolated nodes") {
  TempFile f("% 5\n0 1\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.graph.n == 5);
  CHECK(loaded.graph.degree[4] == 0.0);
  CHECK(loaded.ids.is_identity());

  TempFile bad("% 3\n0 7\n");
  CHECK_THROWS_AS(load_edge_list(bad.path.string(), false), ValidationError);
}

TEST_CASE("load_edge_list: self-loops dropped") {
  TempFile f("0 0\n0 1\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  CHECK(loaded.self_loops_dropped == 1);
  CHECK(loaded.graph.adjacency.coeff(0, 0) == 0.0);
}

TEST_CASE("transition_matrix: small graphs") {
  SUBCASE("path: each node has one neighbor") {
    const auto p = transition_matrix(oracle::path_graph(2));
    CHECK(p.coeff(0, 1) == doctest::Approx(1.0));
    CHECK(p.coeff(1, 0) == doctest::Approx(1.0));
    CHECK(p.coeff(0, 0) == 0.0);
  }
  SUBCASE("triangle: every off-diagonal 0.5") {
    const auto p = transition_matrix(oracle::triangle_graph());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(p.coeff(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
  }
  SUBCASE("star K1,3") {
    const auto p = transition_matrix(oracle::star_graph(3));
    for (int j = 1; j <= 3; ++j) {
      CHECK(p.coeff(0, j) == doctest::Approx(1.0 / 3.0));
      CHECK(p.coeff(j, 0) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("transition_matrix: positive rows sum to one") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const auto g = oracle::erdos_renyi(60, 0.08, seed);
    const auto p = transition_matrix(g);
    const auto sums = p.row_sums();
    for (index_t i = 0; i < g.n; ++i) {
      if (g.degree[i] > 0.0)
        CHECK(std::abs(sums[i] - 1.0) <= 1e-12);
      else
        CHECK(sums[i] == 0.0);
    }
  }
}

TEST_CASE("rw_laplacian: path graph") {
  const auto l = rw_laplacian(oracle::path_graph(2));
  CHECK(l.coeff(0, 0) == doctest::Approx(1.0));
  CHECK(l.coeff(0, 1) == doctest::Approx(-1.0));
  CHECK(l.coeff(1, 0) == doctest::Approx(-1.0));
  CHECK(l.coeff(1, 1) == doctest::Approx(1.0));
  const Eigen::EigenSolver<oracle::Mat> es(l.to_dense());
  std::vector<double> ev = {es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0));
}

TEST_CASE("rw_laplacian: triangle eigenvalues {0, 1.5, 1.5}") {
  const auto l = rw_laplacian(oracle::triangle_graph());
  const auto eig = oracle::rw_eigendecomposition(oracle::triangle_graph());
  CHECK(eig.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.5));
  CHECK(eig.eigenvalues[2] == doctest::Approx(1.5));
  // and the stored sparse matrix agrees with I - P
  const oracle::Mat expected = oracle::Mat::Identity(3, 3) -
                               oracle::dense_transition(oracle::dense_adjacency(oracle::triangle_graph()));
  CHECK(oracle::max_abs_diff(l, expected) <= 1e-15);
}

TEST_CASE("rw_laplacian: constant vector in the kernel, spectrum in [0, 2]") {
  for (const std::uint64_t seed : {11u, 12u}) {
    const auto g = oracle::random_connected_graph(80, 0.05, seed);
    const auto l = rw_laplacian(g);
    const DenseVector ones = DenseVector::Ones(g.n);
    CHECK((l.multiply(ones)).cwiseAbs().maxCoeff() <= 1e-12);
    const auto eig = oracle::rw_eigendecomposition(g);
    CHECK(eig.eigenvalues.minCoeff() >= -1e-10);
    CHECK(eig.eigenvalues.maxCoeff() <= 2.0 + 1e-10);
  }
}

TEST_CASE("rw_laplacian: zero-degree node keeps a bare diagonal row") {
  TempFile f("% 3\n0 1\n");
  const auto loaded = load_edge_list(f.path.string(), false);
  const auto l = rw_laplacian(loaded.graph);
  CHECK(l.coeff(2, 2) == doctest::Approx(1.0));
  CHECK(l.row_indices(2).size() == 1);
}

TEST_CASE("edge list round-trips to an identical graph") {
  const auto tmp = std::filesystem::temp_directory_path() / "progle_roundtrip.edges";
  SUBCASE("integer labels with isolates") {
    TempFile f("% 6\n0 1 0.25\n1 2 1.75\n4 5 3.5\n");
    const auto a = load_edge_list(f.path.string(), true);
    save_edge_list(tmp.string(), a.graph, a.ids);
    const auto b = load_edge_list(tmp.string(), true);
    CHECK(b.graph.n == a.graph.n);
    CHECK(b.graph.adjacency.same_pattern(a.graph.adjacency));
    for (std::size_t k = 0; k < a.graph.adjacency.values().size(); ++k)
      CHECK(a.graph.adjacency.values()[k] == b.graph.adjacency.values()[k]);
  }
  SUBCASE("string labels") {
    TempFile f("alpha beta 0.1\nbeta gamma 7\n");
    const auto a = load_edge_list(f.path.string(), true);
    save_edge_list(tmp.string(), a.graph, a.ids);
    const auto b = load_edge_list(tmp.string(), true);
    CHECK(b.graph.adjacency.same_pattern(a.graph.adjacency));
    for (index_t i = 0; i < a.ids.size(); ++i) CHECK(a.ids.label(i) == b.ids.label(i));
    for (std::size_t k = 0; k < a.graph.adjacency.values().size(); ++k)
      CHECK(a.graph.adjacency.values()[k] == b.graph.adjacency.values()[k]);
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("node id map sidecar round-trips") {
  NodeIdMap ids;
  ids.intern("x");
  ids.intern("42");
  const auto tmp = std::filesystem::temp_directory_path() / "progle_ids.map";
  save_node_id_map(tmp.string(), ids);
  const auto back = load_node_id_map(tmp.string());
  CHECK(back.size() == 2);
  CHECK(back.find("x") == 0);
  CHECK(back.find("42") == 1);
  std::filesystem::remove(tmp);
}
