#pragma once

// Free-group words over a marked alphabet (capital letters are inverses),
// evaluation into Möbius maps, relation checking, and the parabolic
// commutator solve that produces the gasket group.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/mobius.hpp"

namespace kleinian {

/// Letter index: generator g is 2g, its inverse 2g + 1.
using Letter = std::uint16_t;

constexpr Letter inverse_letter(Letter l) { return static_cast<Letter>(l ^ 1u); }
constexpr std::size_t generator_of(Letter l) { return l >> 1; }
constexpr bool is_inverse_letter(Letter l) { return (l & 1u) != 0; }

/// Ordered generator names, each a single lowercase ASCII letter; the
/// uppercase letter denotes the inverse.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::string names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const char ch = names_[i];
      if (!std::islower(static_cast<unsigned char>(ch)))
        throw Error(ErrorCode::InvalidArgument, std::string("generator name must be a lowercase letter: ") + ch);
      if (names_.find(ch) != i) throw Error(ErrorCode::InvalidArgument, std::string("duplicate generator ") + ch);
    }
  }

  std::size_t rank() const { return names_.size(); }
  std::size_t letter_count() const { return 2 * names_.size(); }
  const std::string& names() const { return names_; }
  bool contains(char generator) const { return names_.find(generator) != std::string::npos; }

  Letter letter(char symbol) const {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol)));
    const auto pos = names_.find(lower);
    if (pos == std::string::npos || !std::isalpha(static_cast<unsigned char>(symbol)))
      throw Error(ErrorCode::UnknownLetter, std::string("'") + symbol + "' is not in alphabet '" + names_ + "'");
    return static_cast<Letter>(2 * pos + (std::isupper(static_cast<unsigned char>(symbol)) ? 1 : 0));
  }

  char symbol(Letter l) const {
    const char g = names_.at(generator_of(l));
    return is_inverse_letter(l) ? static_cast<char>(std::toupper(static_cast<unsigned char>(g))) : g;
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::string names_;
};

/// A word over an alphabet and its inverses.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  /// Parses letters and nested commutator brackets, e.g. "ABab" or "[a,[B,c]]".
  /// "1" and the empty string denote the empty word.
  static Word parse(std::string_view text, const Alphabet& alphabet);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  bool is_reduced() const {
    for (std::size_t i = 1; i < letters_.size(); ++i)
      if (letters_[i] == inverse_letter(letters_[i - 1])) return false;
    return true;
  }

  Word inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& l : out) l = inverse_letter(l);
    return Word(std::move(out));
  }

  friend Word operator+(const Word& u, const Word& v) {
    std::vector<Letter> out = u.letters_;
    out.insert(out.end(), v.letters_.begin(), v.letters_.end());
    return Word(std::move(out));
  }

  std::string to_string(const Alphabet& alphabet) const {
    std::string s;
    for (Letter l : letters_) s += alphabet.symbol(l);
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// x^-1 y^-1 x y, matching the word "ABab" for [a, b].
inline Word commutator(const Word& x, const Word& y) { return x.inverse() + y.inverse() + x + y; }

namespace detail {

class WordParser {
 public:
  WordParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  Word parse_all() {
    Word w = parse_sequence();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return w;
  }

 private:
  Word parse_sequence() {
    Word out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      const char ch = text_[pos_];
      if (ch == '[') {
        ++pos_;
        Word x = parse_sequence();
        expect(',');
        Word y = parse_sequence();
        expect(']');
        out = out + commutator(x, y);
      } else if (std::isalpha(static_cast<unsigned char>(ch))) {
        out = out + Word({alphabet_.letter(ch)});
        ++pos_;
      } else if (ch == '1') {
        ++pos_;
      } else {
        break;
      }
    }
    return out;
  }

  void expect(char ch) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Word Word::parse(std::string_view text, const Alphabet& alphabet) {
  return detail::WordParser(text, alphabet).parse_all();
}

/// Free reduction (stack cancellation); idempotent.
inline Word reduce(const Word& w) {
  std::vector<Letter> stack;
  stack.reserve(w.size());
  for (Letter l : w.letters()) {
    if (!stack.empty() && stack.back() == inverse_letter(l))
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

/// Reduces a word written in symbols, rejecting symbols outside the alphabet.
inline Word reduce(std::string_view symbols, const Alphabet& alphabet) {
  return reduce(Word::parse(symbols, alphabet));
}

/// An alphabet with a Möbius image per generator. Some generators may be
/// bound to words in the others (e.g. c := ABab); their images are derived.
class MarkedGroup {
 public:
  struct Binding {
    char name;
    std::string word;
  };

  MarkedGroup() = default;

  MarkedGroup(Alphabet alphabet, const std::vector<MoebiusMap>& generator_images)
      : alphabet_(std::move(alphabet)) {
    if (generator_images.size() != alphabet_.rank())
      throw Error(ErrorCode::InvalidArgument, "one image per generator required");
    images_.reserve(alphabet_.letter_count());
    for (const auto& m : generator_images) {
      images_.push_back(m);
      images_.push_back(m.inverse());
    }
    free_.assign(alphabet_.rank(), true);
  }

  /// Adds a generator whose image is the evaluation of `word` over the
  /// existing alphabet.
  MarkedGroup with_binding(char name, std::string_view word) const {
    if (alphabet_.contains(name)) throw Error(ErrorCode::InvalidArgument, std::string("generator exists: ") + name);
    const MoebiusMap image = evaluate(Word::parse(word, alphabet_));
    MarkedGroup out = *this;
    out.alphabet_ = Alphabet(alphabet_.names() + name);
    out.images_.push_back(image);
    out.images_.push_back(image.inverse());
    out.free_.push_back(false);
    out.bindings_.push_back({name, reduce(Word::parse(word, alphabet_)).to_string(alphabet_)});
    return out;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t free_rank() const { return static_cast<std::size_t>(std::count(free_.begin(), free_.end(), true)); }
  bool is_bound(std::size_t generator) const { return !free_.at(generator); }

  const MoebiusMap& image(Letter l) const { return images_.at(l); }
  const MoebiusMap& image(char symbol) const { return images_.at(alphabet_.letter(symbol)); }

  /// Left-to-right product of the letter images.
  MoebiusMap evaluate(const Word& w) const {
    MoebiusMap m;
    for (Letter l : w.letters()) {
      if (l >= images_.size()) throw Error(ErrorCode::UnknownLetter, "letter index out of range");
      m = m * images_[l];
    }
    return m;
  }

  MoebiusMap evaluate(std::string_view symbols) const { return evaluate(Word::parse(symbols, alphabet_)); }

 private:
  Alphabet alphabet_;
  std::vector<MoebiusMap> images_;
  std::vector<bool> free_;
  std::vector<Binding> bindings_;
};

inline MoebiusMap evaluate(const MarkedGroup& g, const Word& w) { return g.evaluate(w); }

/// Generators of a marked group restricted to its free (unbound) letters.
inline std::vector<Letter> free_letters(const MarkedGroup& g) {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < g.alphabet().rank(); ++i)
    if (!g.is_bound(i)) {
      out.push_back(static_cast<Letter>(2 * i));
      out.push_back(static_cast<Letter>(2 * i + 1));
    }
  return out;
}

/// Streams every freely reduced word of length <= max_len exactly once, in
/// length-lexicographic order with letters ordered a < A < b < B < ...
class ReducedWordStream {
 public:
  ReducedWordStream(std::size_t letter_count, std::size_t max_len)
      : letter_count_(static_cast<Letter>(letter_count)), max_len_(max_len) {}
  ReducedWordStream(const Alphabet& alphabet, std::size_t max_len)
      : ReducedWordStream(alphabet.letter_count(), max_len) {}

  std::optional<Word> next() {
    if (!started_) {
      started_ = true;
      return Word();
    }
    if (letter_count_ == 0) return std::nullopt;
    if (!advance()) {
      if (current_.size() >= max_len_) return std::nullopt;
      current_.assign(current_.size() + 1, 0);
      fill_first_valid(0);
    }
    return Word(current_);
  }

 private:
  // Smallest valid letter at positions >= from.
  void fill_first_valid(std::size_t from) {
    for (std::size_t i = from; i < current_.size(); ++i) {
      current_[i] = 0;
      if (i > 0 && current_[i] == inverse_letter(current_[i - 1])) current_[i] = 1;
      // Rank-0 single-letter alphabets cannot reach here; rank >= 1 always has an alternative.
    }
  }

  bool advance() {
    for (std::size_t pos = current_.size(); pos-- > 0;) {
      Letter next = static_cast<Letter>(current_[pos] + 1);
      if (pos > 0 && next == inverse_letter(current_[pos - 1])) ++next;
      if (next < letter_count_) {
        current_[pos] = next;
        fill_first_valid(pos + 1);
        return true;
      }
    }
    return false;
  }

  Letter letter_count_;
  std::size_t max_len_;
  bool started_ = false;
  std::vector<Letter> current_;
};

inline ReducedWordStream enumerate_reduced_words(const Alphabet& alphabet, std::size_t max_len) {
  return ReducedWordStream(alphabet, max_len);
}

/// Number of reduced words of length exactly n in rank k: 2k(2k-1)^(n-1).
inline std::uint64_t reduced_word_count(std::uint64_t rank, std::uint64_t n) {
  if (n == 0) return 1;
  std::uint64_t out = 2 * rank;
  for (std::uint64_t i = 1; i < n; ++i) out *= 2 * rank - 1;
  return out;
}

struct GroupPresentation {
  Alphabet alphabet;
  std::vector<Word> relators;

  GroupPresentation() = default;
  GroupPresentation(Alphabet a, const std::vector<std::string>& relator_text) : alphabet(std::move(a)) {
    for (const auto& r : relator_text) add_relator(r);
  }

  void add_relator(std::string_view text) {
    Word w = reduce(Word::parse(text, alphabet));
    if (w.empty()) throw Error(ErrorCode::InvalidArgument, "relator reduces to the empty word: " + std::string(text));
    relators.push_back(std::move(w));
  }
};

/// The presentation <a, b, c | [a,[B,c]], [b,[C,a]], [c,[A,b]]>.
inline GroupPresentation borromean_presentation() {
  return GroupPresentation(Alphabet("abc"), {"[a,[B,c]]", "[b,[C,a]]", "[c,[A,b]]"});
}

struct RelatorResult {
  std::string relator;
  double distance;
  bool pass;
};

struct RelationReport {
  std::vector<RelatorResult> relators;
  double tolerance = 0;
  bool pass = true;
  double worst_distance = 0;
};

inline RelationReport check_relations(const MarkedGroup& g, const GroupPresentation& p, double tol) {
  if (p.alphabet.rank() == 0) throw Error(ErrorCode::EmptyPresentation, "presentation has no generators");
  for (char ch : p.alphabet.names())
    if (!g.alphabet().contains(ch))
      throw Error(ErrorCode::UnknownLetter, std::string("presentation generator '") + ch + "' is not marked");
  RelationReport report;
  report.tolerance = tol;
  for (const Word& r : p.relators) {
    const std::string text = r.to_string(p.alphabet);
    const double dist = projective_distance(g.evaluate(Word::parse(text, g.alphabet())), MoebiusMap::identity());
    const bool ok = dist < tol;
    report.relators.push_back({text, dist, ok});
    report.pass = report.pass && ok;
    report.worst_distance = std::max(report.worst_distance, dist);
  }
  return report;
}

/// Result of solving for a parabolic commutator in the family
/// a: z -> z + 1, b: z -> z / (cz + 1).
struct ParabolicCommutatorSolution {
  MarkedGroup group;
  Complex parameter;
  std::vector<Complex> roots;
  Complex commutator_trace;
  SpherePoint commutator_fixed_point;
};

inline MarkedGroup parabolic_family(Complex c) {
  return MarkedGroup(Alphabet("ab"), {MoebiusMap(1, 1, 0, 1), MoebiusMap(1, 0, c, 1)});
}

/// Solves tr(ABab) = -2. The trace is a quadratic polynomial in c; its
/// coefficients are recovered by evaluation at c = 0, 1, -1 and the roots taken
/// in closed form. The default root has nonnegative imaginary part.
inline ParabolicCommutatorSolution solve_parabolic_commutator(bool negative_root = false) {
  auto trace_at = [](Complex c) { return parabolic_family(c).evaluate("ABab").trace(); };
  const Complex t0 = trace_at(0.0), tp = trace_at(1.0), tm = trace_at(-1.0);
  const Complex alpha = t0, beta = 0.5 * (tp - tm), gamma = 0.5 * (tp + tm) - t0;
  // gamma c^2 + beta c + (alpha + 2) = 0
  const Complex disc = std::sqrt(beta * beta - 4.0 * gamma * (alpha + 2.0));
  std::vector<Complex> roots{(-beta + disc) / (2.0 * gamma), (-beta - disc) / (2.0 * gamma)};
  for (auto& r : roots) {
    if (std::abs(r.real()) < 1e-15 * std::abs(r)) r = Complex(0.0, r.imag());
    if (std::abs(r.imag()) < 1e-15 * std::abs(r)) r = Complex(r.real(), 0.0);
  }
  std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
    return x.imag() != y.imag() ? x.imag() > y.imag() : x.real() > y.real();
  });
  const Complex c = negative_root ? roots.back() : roots.front();

  ParabolicCommutatorSolution sol{parabolic_family(c), c, roots, {}, SpherePoint::infinity()};
  const MoebiusMap k = sol.group.evaluate("ABab");
  sol.commutator_trace = k.trace();
  sol.commutator_fixed_point = fixed_points(k).front().point;
  return sol;
}

/// Marking text format, one statement per line ('#' starts a comment):
///   gen a = [[re,im],[re,im];[re,im],[re,im]]   rows (a b; c d)
///   bind c = ABab
///   rel [a,[B,c]]
struct MarkingFile {
  MarkedGroup group;
  GroupPresentation presentation;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline MoebiusMap parse_matrix(const std::string& text, int line_no) {
  std::string cleaned;
  for (char ch : text) cleaned += (ch == '[' || ch == ']' || ch == ',' || ch == ';') ? ' ' : ch;
  std::istringstream in(cleaned);
  double v[8];
  for (double& x : v)
    if (!(in >> x)) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 8 numbers");
  std::string rest;
  if (in >> rest) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing input");
  return MoebiusMap({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
}

}  // namespace detail

inline MarkingFile parse_marking(std::istream& in) {
  std::string gens;
  std::vector<MoebiusMap> images;
  std::vector<std::pair<char, std::string>> binds;
  std::vector<std::pair<std::string, int>> rels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = detail::trim(detail::strip_comment(line));
    if (body.empty()) continue;
    std::istringstream ls(body);
    std::string kw;
    ls >> kw;
    std::string rest;
    std::getline(ls, rest);
    rest = detail::trim(rest);
    auto fail = [&](const std::string& msg) -> Error {
      return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + msg);
    };
    if (kw == "gen" || kw == "bind") {
      const auto eq = rest.find('=');
      if (eq == std::string::npos) throw fail("expected '='");
      const std::string name = detail::trim(rest.substr(0, eq));
      if (name.size() != 1 || !std::islower(static_cast<unsigned char>(name[0])))
        throw fail("generator name must be one lowercase letter");
      if (kw == "gen") {
        if (!binds.empty()) throw fail("gen after bind");
        gens += name[0];
        images.push_back(detail::parse_matrix(rest.substr(eq + 1), line_no));
      } else {
        binds.emplace_back(name[0], detail::trim(rest.substr(eq + 1)));
      }
    } else if (kw == "rel") {
      rels.emplace_back(rest, line_no);
    } else {
      throw fail("unknown statement '" + kw + "'");
    }
  }
  MarkingFile out;
  out.group = MarkedGroup(Alphabet(gens), images);
  for (const auto& [name, word] : binds) out.group = out.group.with_binding(name, word);
  out.presentation.alphabet = out.group.alphabet();
  for (const auto& [text, no] : rels) {
    try {
      out.presentation.add_relator(text);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnknownLetter) throw;
      throw Error(ErrorCode::ParseError, "line " + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

inline std::string format_marking(const MarkedGroup& g, const GroupPresentation* p = nullptr) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < g.alphabet().rank(); ++i) {
    if (g.is_bound(i)) continue;
    const MoebiusMap& m = g.image(static_cast<Letter>(2 * i));
    os << "gen " << g.alphabet().names()[i] << " = [[" << m.a().real() << "," << m.a().imag() << "],["
       << m.b().real() << "," << m.b().imag() << "];[" << m.c().real() << "," << m.c().imag() << "],["
       << m.d().real() << "," << m.d().imag() << "]]\n";
  }
  for (const auto& b : g.bindings()) os << "bind " << b.name << " = " << b.word << "\n";
  if (p)
    for (const auto& r : p->relators) os << "rel " << r.to_string(p->alphabet) << "\n";
  return os.str();
}

}  // namespace kleinian
