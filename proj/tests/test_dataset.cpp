#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "cvqboost/dataset.hpp"
#include "cvqboost/weak.hpp"

using namespace cvqboost;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/cvqboost_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
};

}  // namespace

TEST_CASE("load_csv maps labels by string equality with positive_label") {
  TempFile f("labels.csv");
  f.write("a,b,Class\n1.0,2.0,1\n3.5,-1e2,0\n0.25,4,0\n");
  Dataset ds = load_csv(f.path, "Class", "1");
  CHECK(ds.num_samples() == 3);
  CHECK(ds.num_features() == 2);
  CHECK(ds.labels[0] == 1);
  CHECK(ds.labels[1] == -1);
  CHECK(ds.labels[2] == -1);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.features(1, 1) == doctest::Approx(-100.0));
}

TEST_CASE("load_csv handles quoted fields") {
  TempFile f("quoted.csv");
  f.write("\"x\",\"Class\"\n\"1.5\",\"1\"\n\"2.5\",\"0\"\n");
  Dataset ds = load_csv(f.path, "Class", "1");
  CHECK(ds.labels[0] == 1);
  CHECK(ds.labels[1] == -1);
  CHECK(ds.features(0, 0) == 1.5);
}

TEST_CASE("load_csv errors") {
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(load_csv("/tmp/does_not_exist_cvq.csv", "y", "1"),
                         doctest::Contains("cannot open"), std::runtime_error);
  }
  SUBCASE("missing label column is named in the error") {
    TempFile f("nolabel.csv");
    f.write("a,b\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, "Class", "1"), doctest::Contains("Class"),
                         std::runtime_error);
  }
  SUBCASE("unparseable cell reports location") {
    TempFile f("badcell.csv");
    f.write("a,b,y\n1,2,1\n1,oops,0\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, "y", "1"), doctest::Contains("line 3"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(load_csv(f.path, "y", "1"), doctest::Contains("'b'"),
                         std::runtime_error);
  }
  SUBCASE("empty dataset") {
    TempFile f("empty.csv");
    f.write("a,y\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, "y", "1"), doctest::Contains("no data rows"),
                         std::runtime_error);
  }
  SUBCASE("non-finite cell rejected") {
    TempFile f("inf.csv");
    f.write("a,y\ninf,1\n");
    CHECK_THROWS_AS(load_csv(f.path, "y", "1"), std::runtime_error);
  }
}

TEST_CASE("load_csv round-trips a 38-feature file") {
  SyntheticSpec spec;
  spec.n_samples = 50;
  spec.n_features = 38;
  spec.n_informative = 10;
  spec.minority_fraction = 0.3;
  spec.seed = 3;
  Dataset ds = generate_synthetic(spec);
  TempFile f("wide.csv");
  save_csv(ds, f.path, "Class");
  Dataset back = load_csv(f.path, "Class", "1");
  CHECK(back.num_features() == 38);
  CHECK(back.labels == ds.labels);
  CHECK(back.features == ds.features);  // shortest round-trip formatting is exact
}

TEST_CASE("load_csv_features accepts files with or without a label column") {
  TempFile f("feat_only.csv");
  f.write("a,b\n1,2\n3,4\n");
  Dataset ds = load_csv_features(f.path, "label");
  CHECK(ds.num_features() == 2);
  CHECK(ds.num_samples() == 2);

  TempFile g("feat_label.csv");
  g.write("a,b,label\n1,2,1\n3,4,0\n");
  Dataset with_label = load_csv_features(g.path, "label");
  CHECK(with_label.num_features() == 2);  // label column stripped
  CHECK(with_label.features(1, 1) == 4.0);
}

TEST_CASE("save_csv quotes awkward column names") {
  Dataset ds;
  ds.features.resize(1, 1);
  ds.features << 2.5;
  ds.labels.resize(1);
  ds.labels << 1;
  ds.feature_names = {"amount, usd"};
  TempFile f("quoted_names.csv");
  save_csv(ds, f.path, "class");
  Dataset back = load_csv(f.path, "class", "1");
  CHECK(back.feature_names[0] == "amount, usd");
  CHECK(back.features(0, 0) == 2.5);
}

TEST_CASE("train_test_split basic sizes and determinism") {
  SyntheticSpec spec;
  spec.n_samples = 10;
  spec.n_features = 2;
  spec.n_informative = 1;
  spec.seed = 5;
  Dataset ds = generate_synthetic(spec);
  auto [tr, te] = train_test_split(ds, 0.8, 42, false);
  CHECK(tr.num_samples() == 8);
  CHECK(te.num_samples() == 2);

  auto [tr2, te2] = train_test_split(ds, 0.8, 42, false);
  CHECK(tr.features == tr2.features);
  CHECK(te.labels == te2.labels);
}

TEST_CASE("stratified split preserves class counts exactly") {
  // 100 samples, 10 positives, fraction 0.8 -> 8 positives in train, 2 in test
  Dataset ds;
  ds.features = Eigen::MatrixXd::Random(100, 3);
  ds.labels = Eigen::VectorXi::Constant(100, -1);
  for (int i = 0; i < 10; ++i) ds.labels[i * 10] = 1;
  ds.feature_names = {"a", "b", "c"};

  auto [tr, te] = train_test_split(ds, 0.8, 7, true);
  CHECK(tr.count_label(1) == 8);
  CHECK(te.count_label(1) == 2);
  CHECK(tr.num_samples() == 80);
  CHECK(te.num_samples() == 20);
}

TEST_CASE("split partitions are disjoint and exhaustive") {
  SyntheticSpec spec;
  spec.n_samples = 57;
  spec.n_features = 3;
  spec.n_informative = 2;
  spec.minority_fraction = 0.4;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    spec.seed = seed;
    Dataset ds = generate_synthetic(spec);
    // tag each row uniquely through the first feature so rows are identifiable
    for (Eigen::Index s = 0; s < ds.num_samples(); ++s) ds.features(s, 0) = double(s);
    auto [tr, te] = train_test_split(ds, 0.7, seed, true);
    std::set<double> seen;
    for (Eigen::Index s = 0; s < tr.num_samples(); ++s) seen.insert(tr.features(s, 0));
    for (Eigen::Index s = 0; s < te.num_samples(); ++s) seen.insert(te.features(s, 0));
    CHECK(tr.num_samples() + te.num_samples() == ds.num_samples());
    CHECK(seen.size() == static_cast<std::size_t>(ds.num_samples()));
  }
}

TEST_CASE("split rejects fractions that empty a partition") {
  SyntheticSpec spec;
  spec.n_samples = 4;
  spec.n_features = 2;
  spec.n_informative = 1;
  Dataset ds = generate_synthetic(spec);
  CHECK_THROWS_AS(train_test_split(ds, 0.999, 1, false), std::invalid_argument);
}

TEST_CASE("generate_synthetic shapes and class balance") {
  SyntheticSpec spec;
  spec.n_samples = 1000;
  spec.n_features = 100;
  spec.n_informative = 20;
  spec.class_sep = 2.0;
  spec.minority_fraction = 0.5;
  spec.flip_fraction = 0.0;
  spec.seed = 7;
  Dataset ds = generate_synthetic(spec);
  CHECK(ds.num_samples() == 1000);
  CHECK(ds.num_features() == 100);
  CHECK(ds.count_label(1) == 500);
  CHECK(ds.count_label(-1) == 500);
}

TEST_CASE("generate_synthetic minority count is exact before flips") {
  SyntheticSpec spec;
  spec.n_samples = 1000;
  spec.n_features = 5;
  spec.n_informative = 2;
  spec.minority_fraction = 0.1;
  spec.seed = 11;
  Dataset ds = generate_synthetic(spec);
  CHECK(ds.count_label(1) == 100);
}

TEST_CASE("generate_synthetic is deterministic and flips change labels only") {
  SyntheticSpec spec;
  spec.n_samples = 200;
  spec.n_features = 4;
  spec.n_informative = 2;
  spec.minority_fraction = 0.25;
  spec.seed = 13;
  Dataset a = generate_synthetic(spec);
  Dataset b = generate_synthetic(spec);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  spec.flip_fraction = 0.1;
  Dataset flipped = generate_synthetic(spec);
  CHECK(flipped.features == a.features);
  int differing = 0;
  for (Eigen::Index s = 0; s < a.num_samples(); ++s)
    differing += (flipped.labels[s] != a.labels[s]);
  CHECK(differing == 20);  // floor(0.1 * 200)
}

TEST_CASE("wide separation is linearly separable on an informative feature") {
  SyntheticSpec spec;
  spec.n_samples = 500;
  spec.n_features = 6;
  spec.n_informative = 3;
  spec.class_sep = 20.0;
  spec.minority_fraction = 0.3;
  spec.flip_fraction = 0.0;
  spec.seed = 17;
  Dataset ds = generate_synthetic(spec);
  WeakClassifier wc = fit_logistic(ds, {0});
  int correct = 0;
  for (Eigen::Index s = 0; s < ds.num_samples(); ++s) {
    const double score = evaluate(wc, ds.features.row(s));
    correct += ((score > 0.0 ? 1 : -1) == ds.labels[s]);
  }
  CHECK(correct == ds.num_samples());
  CHECK(wc.train_auc == 1.0);
}

TEST_CASE("standardize hand example and degenerate column") {
  Dataset ds;
  ds.features.resize(2, 2);
  ds.features << 1.0, 5.0, 3.0, 5.0;
  ds.labels.resize(2);
  ds.labels << 1, -1;
  ds.feature_names = {"x", "c"};

  auto [scaled, params] = standardize(ds);
  CHECK(scaled.features(0, 0) == doctest::Approx(-1.0));
  CHECK(scaled.features(1, 0) == doctest::Approx(1.0));
  CHECK(params.means[0] == doctest::Approx(2.0));
  CHECK(params.std_devs[0] == doctest::Approx(1.0));  // population convention

  // constant column passes through and is recorded with std 1
  CHECK(scaled.features(0, 1) == 5.0);
  CHECK(scaled.features(1, 1) == 5.0);
  CHECK(params.std_devs[1] == 1.0);
}

TEST_CASE("apply_scaler reproduces the standardized training data") {
  SyntheticSpec spec;
  spec.n_samples = 120;
  spec.n_features = 7;
  spec.n_informative = 3;
  spec.minority_fraction = 0.5;
  spec.seed = 23;
  Dataset ds = generate_synthetic(spec);
  auto [scaled, params] = standardize(ds);
  Dataset again = apply_scaler(ds, params);
  CHECK(again.features == scaled.features);
}

TEST_CASE("standardized columns have near-exact zero mean and unit variance") {
  SyntheticSpec spec;
  spec.n_samples = 333;
  spec.n_features = 9;
  spec.n_informative = 4;
  spec.minority_fraction = 0.4;
  spec.seed = 29;
  Dataset ds = generate_synthetic(spec);
  auto [scaled, params] = standardize(ds);
  for (Eigen::Index f = 0; f < scaled.num_features(); ++f) {
    const double mean = scaled.features.col(f).mean();
    const double var =
        (scaled.features.col(f).array() - mean).square().sum() / double(scaled.num_samples());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("synthetic spec invariants are enforced") {
  SyntheticSpec spec;
  spec.n_samples = 10;
  spec.n_features = 3;
  spec.n_informative = 4;  // > n_features
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  spec.n_informative = 2;
  spec.minority_fraction = 0.01;  // 0.01 * 10 < 1
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}
