#include "hitchlab/words.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <thread>

#include "hitchlab/error.hpp"

namespace hitchlab {

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& x : out) x = inverse(x);
  return out;
}

std::string to_string(const Word& w) {
  std::string out;
  for (Letter x : w) {
    const int gen = generator_of(x);
    char c = (gen % 2 == 0) ? 'a' : 'b';
    if (is_inverse_letter(x)) c = static_cast<char>(std::toupper(c));
    out += c;
    out += std::to_string(gen / 2 + 1);
  }
  return out;
}

Word parse_word(const std::string& text) {
  Word out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    int kind;
    switch (c) {
      case 'a': kind = 0; break;
      case 'A': kind = 1; break;
      case 'b': kind = 2; break;
      case 'B': kind = 3; break;
      default: fail(ErrorKind::InvalidArgument, "bad letter '" + std::string(1, c) + "' in word " + text);
    }
    ++i;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) fail(ErrorKind::InvalidArgument, "missing handle index in word " + text);
    int handle = std::stoi(text.substr(i, j - i));
    if (handle < 1 || handle > 60) fail(ErrorKind::InvalidArgument, "handle index out of range in " + text);
    out.push_back(static_cast<Letter>(4 * (handle - 1) + kind));
    i = j;
  }
  return out;
}

Word surface_relator(int genus) {
  Word r;
  for (int i = 0; i < genus; ++i) {
    const auto a = static_cast<Letter>(4 * i);
    const auto b = static_cast<Letter>(4 * i + 2);
    r.insert(r.end(), {a, b, inverse(a), inverse(b)});
  }
  return r;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && out.back() == inverse(x)) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  std::size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == inverse(r[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(r.begin() + static_cast<std::ptrdiff_t>(lo), r.begin() + static_cast<std::ptrdiff_t>(hi));
}

Word min_rotation(const Word& w) {
  const std::size_t n = w.size();
  if (n < 2) return w;
  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    for (std::size_t k = 0; k < n; ++k) {
      Letter x = w[(s + k) % n], y = w[(best + k) % n];
      if (x != y) {
        if (x < y) best = s;
        break;
      }
    }
  }
  Word out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = w[(best + k) % n];
  return out;
}

bool is_proper_power(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return true;
  }
  return false;
}

SurfaceGroup::SurfaceGroup(int genus) : genus_(genus) {
  if (genus < 2 || genus > 60) fail(ErrorKind::InvalidArgument, "genus must be in [2, 60]");
  relator_ = surface_relator(genus);
  const Word rinv = hitchlab::inverse(relator_);
  const std::size_t n = relator_.size();
  succ_[0].assign(n, 0);
  succ_[1].assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    succ_[0][relator_[i]] = relator_[(i + 1) % n];
    succ_[1][rinv[i]] = rinv[(i + 1) % n];
  }
}

std::size_t SurfaceGroup::piece_length(const Word& w, std::size_t p, int chain, bool cyclic) const {
  const std::size_t n = w.size();
  if (p >= n) return 0;
  const std::size_t cap = std::min(relator_.size(), cyclic ? n : n - p);
  std::size_t m = 1;
  while (m < cap && w[(p + m) % n] == succ_[chain][w[(p + m - 1) % n]]) ++m;
  return m;
}

namespace {

// Letters x, s(x), s^2(x), ... along the chain.
Word chain_from(const std::vector<Letter>& succ, Letter x, std::size_t len) {
  Word out(len);
  for (std::size_t k = 0; k < len; ++k) {
    out[k] = x;
    x = succ[x];
  }
  return out;
}

// Word of the complement r'[m..R) inverted, i.e. what r'[0..m) equals.
Word complement_inverse(const std::vector<Letter>& succ, Letter start, std::size_t m, std::size_t relator_len) {
  Word full = chain_from(succ, start, relator_len);
  Word out;
  for (std::size_t k = relator_len; k > m; --k) out.push_back(inverse(full[k - 1]));
  return out;
}

}  // namespace

Word SurfaceGroup::dehn_reduce(const Word& input) const {
  const std::size_t r = relator_.size();
  Word w = free_reduce(input);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < w.size() && !changed; ++p) {
      for (int c = 0; c < 2 && !changed; ++c) {
        const std::size_t m = piece_length(w, p, c, false);
        if (2 * m <= r) continue;
        Word repl = complement_inverse(succ_[c], w[p], m, r);
        Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
        next.insert(next.end(), repl.begin(), repl.end());
        next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(p + m), w.end());
        w = free_reduce(next);
        changed = true;
      }
    }
  }
  return w;
}

Word SurfaceGroup::cyclic_dehn_reduce(const Word& input) const {
  const std::size_t r = relator_.size();
  Word w = cyclic_reduce(input);
  bool changed = true;
  while (changed && !w.empty()) {
    changed = false;
    const std::size_t n = w.size();
    for (std::size_t p = 0; p < n && !changed; ++p) {
      for (int c = 0; c < 2 && !changed; ++c) {
        const std::size_t m = piece_length(w, p, c, true);
        if (2 * m <= r) continue;
        Word next = complement_inverse(succ_[c], w[p], m, r);
        for (std::size_t k = m; k < n; ++k) next.push_back(w[(p + k) % n]);
        w = cyclic_reduce(next);
        changed = true;
      }
    }
  }
  return w;
}

Word SurfaceGroup::swap_half(const Word& w, std::size_t p, int chain) const {
  const std::size_t n = w.size();
  const std::size_t half = relator_.size() / 2;
  Word next = complement_inverse(succ_[chain], w[p], half, relator_.size());
  for (std::size_t k = half; k < n; ++k) next.push_back(w[(p + k) % n]);
  return cyclic_reduce(next);
}

Word SurfaceGroup::canonical(const Word& w, bool unoriented) const {
  constexpr std::size_t kOrbitCap = 4096;
  const std::size_t half = relator_.size() / 2;

  auto oriented = [&](const Word& input) {
    Word start = cyclic_dehn_reduce(input);
    while (true) {
      std::set<Word> seen;
      std::deque<Word> queue;
      Word first = min_rotation(start);
      seen.insert(first);
      queue.push_back(first);
      bool shortened = false;
      while (!queue.empty() && !shortened && seen.size() < kOrbitCap) {
        Word u = queue.front();
        queue.pop_front();
        const std::size_t n = u.size();
        for (std::size_t p = 0; p < n && !shortened; ++p) {
          for (int c = 0; c < 2 && !shortened; ++c) {
            if (piece_length(u, p, c, true) != half) continue;
            Word v = cyclic_dehn_reduce(swap_half(u, p, c));
            if (v.size() < n) {
              start = v;
              shortened = true;
              break;
            }
            v = min_rotation(v);
            if (seen.insert(v).second) queue.push_back(v);
          }
        }
      }
      if (!shortened) return *seen.begin();
    }
  };

  Word best = oriented(w);
  if (unoriented) best = std::min(best, oriented(hitchlab::inverse(w)));
  return best;
}

double translation_length_2x2(const Matrix& m) {
  const double t = std::abs(m.trace()) / 2.0;
  return t <= 1.0 ? 0.0 : 2.0 * std::acosh(t);
}

namespace {

struct Enumerator {
  const SurfaceGroup& group;
  const EnumerationOptions& opt;
  std::size_t half;
  double cosh_cap = 0.0;  // prune when |P|_F^2 / 2 exceeds this
  std::vector<Eigen::Matrix2d> seed_letters;

  // Per-depth state.
  Word word;
  std::vector<std::size_t> run[2];
  std::vector<std::size_t> period;
  std::vector<Eigen::Matrix2d> prod;

  std::vector<EnumeratedClass> out;

  Enumerator(const SurfaceGroup& g, const EnumerationOptions& o) : group(g), opt(o) {
    half = g.relator_length() / 2;
    const auto cap = static_cast<std::size_t>(o.max_len) + 1;
    word.reserve(cap);
    for (auto& r : run) r.reserve(cap);
    period.reserve(cap);
    prod.reserve(cap);
    if (o.seed) {
      const auto& gens = o.seed->generators;
      if (static_cast<int>(gens.size()) != g.rank()) {
        fail(ErrorKind::InvalidArgument, "seed cutoff needs one 2x2 matrix per generator");
      }
      seed_letters.resize(static_cast<std::size_t>(g.alphabet_size()));
      for (int k = 0; k < g.rank(); ++k) {
        Eigen::Matrix2d m = gens[static_cast<std::size_t>(k)];
        seed_letters[2 * static_cast<std::size_t>(k)] = m;
        seed_letters[2 * static_cast<std::size_t>(k) + 1] = m.inverse();
      }
      cosh_cap = std::cosh(o.seed->max_length + o.seed->slack);
    }
  }

  // Pushes x if the extended prefix survives pruning.
  bool push(Letter x) {
    const std::size_t t = word.size();
    if (t > 0 && word.back() == inverse(x)) return false;
    std::size_t p = 1;
    if (t > 0) {
      const Letter ref = word[t - period.back()];
      if (x < ref) return false;
      p = (x == ref) ? period.back() : t + 1;
    }
    std::size_t r[2];
    for (int c = 0; c < 2; ++c) {
      r[c] = (t > 0 && group.successor(c, word.back()) == x) ? run[c].back() + 1 : 1;
      if (r[c] > half) return false;
    }
    Eigen::Matrix2d m;
    if (opt.seed) {
      m = t > 0 ? Eigen::Matrix2d(prod.back() * seed_letters[x]) : seed_letters[x];
      if (m.squaredNorm() / 2.0 > cosh_cap) return false;
    }
    word.push_back(x);
    period.push_back(p);
    run[0].push_back(r[0]);
    run[1].push_back(r[1]);
    if (opt.seed) prod.push_back(m);
    return true;
  }

  void pop() {
    word.pop_back();
    period.pop_back();
    run[0].pop_back();
    run[1].pop_back();
    if (opt.seed) prod.pop_back();
  }

  void maybe_emit() {
    const std::size_t n = word.size();
    if (n % period.back() != 0) return;
    if (n > 1 && word.back() == inverse(word.front())) return;
    std::size_t longest = 0;
    for (std::size_t p = 0; p < n; ++p) {
      for (int c = 0; c < 2; ++c) longest = std::max(longest, group.piece_length(word, p, c, true));
    }
    if (longest > half) return;
    if (longest == half || opt.unoriented) {
      if (group.canonical(word, opt.unoriented) != word) return;
    }
    double seed_length = std::numeric_limits<double>::quiet_NaN();
    if (opt.seed) {
      seed_length = translation_length_2x2(prod.back());
      if (seed_length > opt.seed->max_length) return;
    }
    out.push_back({word, seed_length});
  }

  void dfs() {
    maybe_emit();
    if (static_cast<int>(word.size()) >= opt.max_len) return;
    for (int x = 0; x < group.alphabet_size(); ++x) {
      if (!push(static_cast<Letter>(x))) continue;
      dfs();
      pop();
    }
  }
};

}  // namespace

std::vector<EnumeratedClass> enumerate_classes(const EnumerationOptions& options) {
  if (options.max_len < 1) fail(ErrorKind::InvalidArgument, "max_len must be >= 1");
  if (options.max_len > 200) fail(ErrorKind::InvalidArgument, "max_len must be <= 200");
  SurfaceGroup group(options.genus);
  const int alpha = group.alphabet_size();

  // Length-1 words and the list of surviving length-2 prefixes.
  std::vector<EnumeratedClass> result;
  std::vector<std::pair<Letter, Letter>> tasks;
  {
    Enumerator root(group, options);
    for (int x = 0; x < alpha; ++x) {
      if (!root.push(static_cast<Letter>(x))) continue;
      root.maybe_emit();
      if (options.max_len >= 2) {
        for (int y = 0; y < alpha; ++y) {
          if (!root.push(static_cast<Letter>(y))) continue;
          tasks.emplace_back(static_cast<Letter>(x), static_cast<Letter>(y));
          root.pop();
        }
      }
      root.pop();
    }
    result = std::move(root.out);
  }

  std::vector<std::vector<EnumeratedClass>> per_task(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Enumerator e(group, options);
      e.push(tasks[i].first);
      e.push(tasks[i].second);
      e.dfs();
      per_task[i] = std::move(e.out);
    }
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& part : per_task) {
    for (auto& c : part) result.push_back(std::move(c));
  }
  std::sort(result.begin(), result.end(), [](const EnumeratedClass& a, const EnumeratedClass& b) {
    if (a.canonical.size() != b.canonical.size()) return a.canonical.size() < b.canonical.size();
    return a.canonical < b.canonical;
  });
  return result;
}

std::size_t class_count(int genus, int max_len, bool unoriented) {
  EnumerationOptions opt;
  opt.genus = genus;
  opt.max_len = max_len;
  opt.unoriented = unoriented;
  return enumerate_classes(opt).size();
}

}  // namespace hitchlab
