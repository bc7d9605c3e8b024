#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "hitchlab/rep.hpp"
#include "hitchlab/words.hpp"

using namespace hitchlab;

namespace {

using M2 = Eigen::Matrix2d;

std::vector<M2> seed_letters() {
  std::vector<M2> out;
  for (const auto& g : seed_generators()) {
    out.push_back(g);
    out.push_back(M2(g).inverse());
  }
  return out;
}

M2 product(const std::vector<M2>& letters, const Word& w) {
  M2 m = M2::Identity();
  for (Letter x : w) m = m * letters[x];
  return m;
}

// Equality in PSL(2,R); the seed representation is faithful.
bool same_element(const M2& a, const M2& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol || (a + b).cwiseAbs().maxCoeff() <= tol;
}

void reduced_words(int alphabet, std::size_t max_len, Word& cur, std::vector<Word>& out) {
  out.push_back(cur);
  if (cur.size() == max_len) return;
  for (int x = 0; x < alphabet; ++x) {
    const auto l = static_cast<Letter>(x);
    if (!cur.empty() && cur.back() == inverse(l)) continue;
    cur.push_back(l);
    reduced_words(alphabet, max_len, cur, out);
    cur.pop_back();
  }
}

std::size_t find(std::vector<std::size_t>& p, std::size_t x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

Word random_word(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> pick(0, 7);
  Word w;
  for (std::size_t k = 0; k < len; ++k) w.push_back(static_cast<Letter>(pick(rng)));
  return w;
}

}  // namespace

TEST_CASE("free reduction") {
  CHECK(free_reduce(parse_word("a1b1B1A1")).empty());
  CHECK(free_reduce(parse_word("a1b1A1")) == parse_word("a1b1A1"));
  Word w;
  for (int k = 0; k < 5; ++k) {
    w.push_back(0);
    w.push_back(1);
  }
  w.push_back(0);
  CHECK(free_reduce(w) == Word{0});
  CHECK(to_string(parse_word("a1B2A2b1")) == "a1B2A2b1");
}

TEST_CASE("Dehn reduction") {
  const SurfaceGroup g(2);
  const Word rel = surface_relator(2);
  CHECK(g.dehn_reduce(rel).empty());
  Word cut = rel;
  const Letter last = cut.back();
  cut.pop_back();
  const Word r = g.dehn_reduce(cut);
  CHECK(r == Word{inverse(last)});
  const auto letters = seed_letters();
  CHECK(same_element(product(letters, cut), product(letters, r), 1e-9));

  std::vector<Word> shorts;
  Word cur;
  reduced_words(8, 4, cur, shorts);
  for (const auto& w : shorts) CHECK(g.dehn_reduce(w) == w);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 300; ++k) {
    const Word w = random_word(rng, 14);
    const Word red = g.dehn_reduce(w);
    CHECK(red.size() <= free_reduce(w).size());
    CHECK(same_element(product(letters, w), product(letters, red), 1e-6 * product(letters, w).norm()));
  }
}

TEST_CASE("class counts for short words match a brute-force conjugacy search") {
  const auto letters = seed_letters();
  std::vector<Word> words, conj;
  Word cur;
  reduced_words(8, 2, cur, words);
  words.erase(words.begin());  // identity
  reduced_words(8, 6, cur, conj);
  std::vector<M2> cm, cinv;
  for (const auto& c : conj) {
    cm.push_back(product(letters, c));
    cinv.push_back(cm.back().inverse());
  }
  std::vector<std::size_t> parent(words.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t a = 0; a < words.size(); ++a) {
    const M2 u = product(letters, words[a]);
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      const M2 v = product(letters, words[b]);
      if (std::abs(std::abs(u.trace()) - std::abs(v.trace())) > 1e-9) continue;
      for (std::size_t k = 0; k < cm.size(); ++k) {
        if (same_element(M2(cm[k] * u * cinv[k]), v, 1e-6)) {
          parent[find(parent, a)] = find(parent, b);
          break;
        }
      }
    }
  }
  std::set<std::size_t> roots;
  for (std::size_t a = 0; a < words.size(); ++a) roots.insert(find(parent, a));
  CHECK(class_count(2, 2) == roots.size());
  CHECK(class_count(2, 1) == 8);
}

TEST_CASE("class counts are monotone and the listing is deterministic") {
  std::size_t prev = 0;
  for (int l = 1; l <= 5; ++l) {
    const auto n = class_count(2, l);
    CHECK(n >= prev);
    prev = n;
  }
  EnumerationOptions o;
  o.max_len = 5;
  const auto one = enumerate_classes(o);
  o.workers = 3;
  const auto three = enumerate_classes(o);
  REQUIRE(one.size() == three.size());
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k].canonical == three[k].canonical);
}

TEST_CASE("canonical forms are conjugacy invariants") {
  const SurfaceGroup g(2);
  const auto letters = seed_letters();
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  for (int k = 0; k < 200; ++k) {
    const Word w = random_word(rng, len(rng));
    const Word c = g.canonical(w);
    Word rot = w;
    std::rotate(rot.begin(), rot.begin() + static_cast<long>(rot.size() / 2), rot.end());
    CHECK(g.canonical(rot) == c);
    const Word x = random_word(rng, 3);
    Word conj = x;
    conj.insert(conj.end(), w.begin(), w.end());
    const Word xi = inverse(x);
    conj.insert(conj.end(), xi.begin(), xi.end());
    CHECK(g.canonical(conj) == c);
    const double t1 = std::abs(product(letters, w).trace());
    const double t2 = std::abs(product(letters, c).trace());
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-9));
  }
  // Every enumerated class is its own canonical form.
  EnumerationOptions o;
  o.max_len = 4;
  for (const auto& e : enumerate_classes(o)) CHECK(g.canonical(e.canonical) == e.canonical);
}

TEST_CASE("seed-length enumeration is complete") {
  const double s = 5.0;
  EnumerationOptions by_len;
  by_len.max_len = 4;
  EnumerationOptions by_seed;
  by_seed.max_len = 40;
  by_seed.seed = SeedCutoff{seed_generators(), s, 6.0};
  const auto letters = seed_letters();
  std::set<Word> seeded;
  for (const auto& e : enumerate_classes(by_seed)) {
    CHECK(e.seed_length <= s);
    CHECK(e.seed_length == doctest::Approx(translation_length_2x2(product(letters, e.canonical))).epsilon(1e-9));
    seeded.insert(e.canonical);
  }
  std::size_t short_ones = 0;
  for (const auto& e : enumerate_classes(by_len)) {
    if (translation_length_2x2(product(letters, e.canonical)) <= s - 1e-9) {
      ++short_ones;
      CHECK(seeded.count(e.canonical) == 1);
    }
  }
  CHECK(short_ones > 0);
}

TEST_CASE("word utilities") {
  CHECK(is_proper_power(parse_word("a1b1a1b1")));
  CHECK_FALSE(is_proper_power(parse_word("a1b1a1")));
  CHECK(min_rotation(parse_word("b1a1")) == parse_word("a1b1"));
  CHECK(cyclic_reduce(parse_word("b1a1B1")) == parse_word("a1"));
  CHECK(inverse(parse_word("a1b2")) == parse_word("B2A1"));
  CHECK(translation_length_2x2(M2::Identity()) == 0.0);
}
