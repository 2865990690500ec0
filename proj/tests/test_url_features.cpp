#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "phishlex/url_features.hpp"
#include "test_helpers.hpp"

using namespace phishlex;
using namespace phishlex::features;

namespace {

const StubIndexProvider kStub;

double feat(const FeatureVector& fv, const char* name) {
  return fv.values[FeatureSchema::canonical().index_of(name)];
}

std::string random_ascii_url(std::mt19937_64& rng) {
  static const std::string chars =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      "./?=@-_%&:#~+";
  std::uniform_int_distribution<std::size_t> len(1, 80);
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  std::string url;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) url += chars[pick(rng)];
  return url;
}

}  // namespace

TEST_CASE("parse_url splits scheme, hostname, path, and query") {
  const ParsedUrl u = parse_url("https://lastpass.com/signup2.php?ac=1");
  CHECK(u.scheme == "https");
  CHECK(u.hostname == "lastpass.com");
  CHECK(u.path == "signup2.php");
  CHECK(u.query == "ac=1");
  CHECK(u.first_dir == "signup2.php");

  const ParsedUrl bare = parse_url("example.com");
  CHECK_FALSE(bare.scheme.has_value());
  CHECK(bare.hostname == "example.com");
  CHECK(bare.path.empty());
  CHECK_FALSE(bare.query.has_value());

  const ParsedUrl userinfo = parse_url("http://u@10.0.0.1/a/b");
  CHECK(userinfo.hostname == "10.0.0.1");
  CHECK(userinfo.first_dir == "a");
  CHECK(userinfo.path == "a/b");

  CHECK_THROWS_AS(parse_url(""), EmptyUrlError);
  CHECK_THROWS_AS(parse_url("   \t  "), EmptyUrlError);
}

TEST_CASE("parse_url edge shapes") {
  // Query with no path.
  const ParsedUrl q = parse_url("http://a.com?x=1");
  CHECK(q.hostname == "a.com");
  CHECK(q.path.empty());
  CHECK(q.query == "x=1");
  CHECK_FALSE(q.has_path);

  // Trailing slash produces an empty path with the separator present.
  const ParsedUrl t = parse_url("http://a.com/");
  CHECK(t.has_path);
  CHECK(t.path.empty());
  CHECK(t.path_component() == "/");

  // Hostname never contains '/'.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::string url = random_ascii_url(rng);
    try {
      const ParsedUrl u = parse_url(url);
      CHECK(u.hostname.find('/') == std::string::npos);
    } catch (const EmptyUrlError&) {
    }
  }
}

TEST_CASE("extract_features matches hand-counted values") {
  const FeatureVector fv = extract_features("http://192.168.1.5/login", kStub);
  CHECK(feat(fv, "use_of_ip") == 1);
  CHECK(feat(fv, "sus_url") == 1);
  CHECK(feat(fv, "count_dot") == 3);
  CHECK(feat(fv, "url_length") == 24);

  const FeatureVector lp = extract_features("https://lastpass.com/signup2.php?ac=1", kStub);
  CHECK(feat(lp, "url_length") == 37);
  CHECK(feat(lp, "hostname_length") == 12);
  CHECK(feat(lp, "count_question") == 1);
  CHECK(feat(lp, "count_http") == 1);
  CHECK(feat(lp, "count_https") == 1);
  CHECK(feat(lp, "count_dir") == 1);
  CHECK(feat(lp, "fd_length") == 11);
  CHECK(feat(lp, "count_dot") == 2);

  CHECK_THROWS_AS(extract_features("", kStub), EmptyUrlError);
}

TEST_CASE("feature definitions: ip detection, shorteners, keywords, counts") {
  auto v = [&](const std::string& url, const char* name) {
    return feat(extract_features(url, kStub), name);
  };

  // Out-of-range octets are not an IP.
  CHECK(v("http://999.1.1.1/x", "use_of_ip") == 0);
  CHECK(v("http://255.255.255.255/", "use_of_ip") == 1);
  CHECK(v("http://0x7f.0x0.0x0.0x1/", "use_of_ip") == 1);
  CHECK(v("http://1.2.3.4.5/", "use_of_ip") == 0);
  CHECK(v("http://1.2.3/", "use_of_ip") == 0);

  // Shortener suffix matching respects label boundaries.
  CHECK(v("https://bit.ly/abc", "short_url") == 1);
  CHECK(v("https://www.bit.ly/abc", "short_url") == 1);
  CHECK(v("https://notbit.ly/abc", "short_url") == 0);
  CHECK(v("https://github.com/abc", "short_url") == 0);

  // Keyword match is case-insensitive, anywhere in the raw string.
  CHECK(v("http://x.com/PayPal-verify", "sus_url") == 1);
  CHECK(v("http://x.com/harmless", "sus_url") == 0);

  // "http" counting includes the prefix of "https".
  CHECK(v("https://a.com/https", "count_https") == 2);
  CHECK(v("https://a.com/https", "count_http") == 2);
  CHECK(v("http://a.com/?go=http://b.com", "count_http") == 2);

  // Embedded '//' inside the path.
  CHECK(v("http://a.com/x//y", "count_embed") == 1);
  CHECK(v("http://a.com/x/y", "count_embed") == 0);

  // '@' and abnormal URL behavior.
  CHECK(v("http://u@a.com/x", "count_at") == 1);
  CHECK(v("http://a.com/x", "abnormal_url") == 0);

  // Stub index provider answers 1.
  CHECK(v("http://a.com/x", "google_index") == 1);

  // Digits and letters over the raw string.
  CHECK(v("http://a1.com/2b", "count_digits") == 2);
  CHECK(v("ab12", "count_letters") == 2);
}

TEST_CASE("schema is fixed, versioned, and complete") {
  const FeatureSchema& s = FeatureSchema::canonical();
  CHECK(s.names.size() == kFeatureCount);
  CHECK_FALSE(s.schema_version.empty());
  // Names unique.
  std::set<std::string> unique(s.names.begin(), s.names.end());
  CHECK(unique.size() == kFeatureCount);
  CHECK(s.index_of("url_length") == 15);
  CHECK_THROWS_AS(s.index_of("nope"), InvalidArgumentError);
}

TEST_CASE("determinism: identical vectors on repeated extraction") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    const std::string url = random_ascii_url(rng);
    try {
      const FeatureVector a = extract_features(url, kStub);
      const FeatureVector b = extract_features(url, kStub);
      CHECK(a.values == b.values);
    } catch (const EmptyUrlError&) {
    }
  }
}

TEST_CASE("monotonicity: appending characters") {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 200; ++i) {
    std::string url = "http://" + random_ascii_url(rng);
    const FeatureVector base = extract_features(url, kStub);
    const FeatureVector longer = extract_features(url + "a", kStub);
    CHECK(feat(longer, "url_length") >= feat(base, "url_length"));
    const FeatureVector q = extract_features(url + "?", kStub);
    CHECK(feat(q, "count_question") == feat(base, "count_question") + 1);
  }
}

TEST_CASE("kind safety over random ASCII strings") {
  const FeatureSchema& schema = FeatureSchema::canonical();
  std::mt19937_64 rng(107);
  for (int i = 0; i < 500; ++i) {
    const std::string url = random_ascii_url(rng);
    FeatureVector fv;
    try {
      fv = extract_features(url, kStub);
    } catch (const EmptyUrlError&) {
      continue;
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double v = fv.values[j];
      if (schema.kinds[j] == FeatureKind::kBinary) {
        CHECK((v == 0.0 || v == 1.0));
      } else {
        CHECK(v >= 0.0);
        CHECK(v == std::floor(v));
      }
    }
  }
}

TEST_CASE("component consistency: path slashes plus outside slashes = total") {
  std::mt19937_64 rng(109);
  for (int i = 0; i < 300; ++i) {
    const std::string url = random_ascii_url(rng);
    try {
      const ParsedUrl u = parse_url(url);
      const FeatureVector fv = extract_features(url, kStub);
      const auto total = static_cast<double>(
          std::count(u.raw.begin(), u.raw.end(), '/'));
      const std::string path = u.path_component();
      const auto in_path =
          static_cast<double>(std::count(path.begin(), path.end(), '/'));
      CHECK(feat(fv, "count_dir") == in_path);
      CHECK(in_path <= total);
      // The remainder must live outside the path component.
      std::string outside = u.raw;
      if (!path.empty()) {
        const std::size_t at = outside.find(path);
        REQUIRE(at != std::string::npos);
        outside.erase(at, path.size());
      }
      const auto out_count =
          static_cast<double>(std::count(outside.begin(), outside.end(), '/'));
      CHECK(in_path + out_count == total);
    } catch (const EmptyUrlError&) {
    }
  }
}

TEST_CASE("featurize_batch keeps row order and collects errors") {
  std::vector<RawUrlRecord> records;
  records.push_back({"http://a.com/x", 1, Source::kPhishFeed, {}, {}, {}, {}});
  records.push_back({"https://b.org/y", 0, Source::kLegitList, {}, {}, {}, {}});
  BatchResult r = featurize_batch(records, kStub);
  CHECK(r.matrix.rows() == 2);
  CHECK(r.errors.empty());
  CHECK(r.matrix.labels == std::vector<int>{1, 0});

  records.push_back({"   ", 1, Source::kPhishFeed, {}, {}, {}, {}});
  BatchResult r2 = featurize_batch(records, kStub);
  CHECK(r2.matrix.rows() == 2);
  REQUIRE(r2.errors.size() == 1);
  CHECK(r2.errors[0].row_index == 2);

  std::vector<RawUrlRecord> empty;
  CHECK_THROWS_AS(featurize_batch(empty, kStub), BatchEmptyError);
  std::vector<RawUrlRecord> all_bad{{"", 1, Source::kPhishFeed, {}, {}, {}, {}}};
  CHECK_THROWS_AS(featurize_batch(all_bad, kStub), BatchEmptyError);
}

TEST_CASE("word lists load from files and override the bundled defaults") {
  testutil::TempDir dir("wordlists");
  testutil::write_text(dir.file("kw.txt"), "zebra\nquux\n");
  testutil::write_text(dir.file("short.txt"), "short.example\n");
  const WordLists lists = WordLists::load(dir.file("kw.txt"), dir.file("short.txt"));
  CHECK(lists.suspicious_keywords == std::vector<std::string>{"zebra", "quux"});

  const StubIndexProvider stub;
  const FeatureVector fv = extract_features("http://x.short.example/zebra", stub, lists);
  CHECK(feat(fv, "sus_url") == 1);
  CHECK(feat(fv, "short_url") == 1);
  // Bundled keywords no longer apply under the override.
  const FeatureVector fv2 = extract_features("http://x.com/login", stub, lists);
  CHECK(feat(fv2, "sus_url") == 0);

  CHECK_THROWS_AS(WordLists::load(dir.file("missing.txt"), ""), FileNotFoundError);
}
