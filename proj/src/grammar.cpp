#include "geoscout/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace geoscout {

int ParsedAnswer::valid_count() const {
  return static_cast<int>(std::count(item_validity.begin(), item_validity.end(), true));
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Cursor over a string_view; every method is bounds-checked.
class Scanner {
 public:
  Scanner(std::string_view s, std::size_t pos = 0) : s_(s), pos_(pos) {}
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead >= s_.size() ? '\0' : s_[pos_ + ahead]; }

  void skip_ws() {
    while (!done() && is_space(s_[pos_])) ++pos_;
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool eat_any(std::string_view chars) {
    if (done() || chars.find(s_[pos_]) == std::string_view::npos) return false;
    ++pos_;
    return true;
  }
  bool eat_word(std::string_view w) {
    if (s_.size() - pos_ < w.size()) return false;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (lower(s_[pos_ + i]) != w[i]) return false;
    pos_ += w.size();
    return true;
  }
  // Unsigned decimal integer of at most 9 digits.
  std::optional<int> integer() {
    const std::size_t start = pos_;
    while (!done() && is_digit(s_[pos_])) ++pos_;
    const std::size_t len = pos_ - start;
    if (len == 0 || len > 9) {
      pos_ = start;
      return std::nullopt;
    }
    int v = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, v);
    return v;
  }
  // [+-]? digits [. digits]? ([eE] [+-]? digits)?  or  [+-]? . digits ...
  std::optional<double> number() {
    const std::size_t start = pos_;
    bool neg = false;
    if (peek() == '+' || peek() == '-') {
      neg = peek() == '-';
      ++pos_;
    }
    const std::size_t body = pos_;
    std::size_t digits = 0;
    while (!done() && is_digit(s_[pos_])) ++pos_, ++digits;
    if (peek() == '.') {
      ++pos_;
      while (!done() && is_digit(s_[pos_])) ++pos_, ++digits;
    }
    if (digits == 0) {
      pos_ = start;
      return std::nullopt;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_++;
      if (peek() == '+' || peek() == '-') ++pos_;
      std::size_t ed = 0;
      while (!done() && is_digit(s_[pos_])) ++pos_, ++ed;
      if (ed == 0) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + body, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      return std::nullopt;
    }
    return neg ? -v : v;
  }

 private:
  std::string_view s_;
  std::size_t pos_;
};

// Positions where `word` starts a token (not preceded by an identifier char).
std::vector<std::size_t> keyword_positions(std::string_view s, std::string_view word) {
  std::vector<std::size_t> out;
  if (s.size() < word.size()) return out;
  for (std::size_t i = 0; i + word.size() <= s.size(); ++i) {
    if (i > 0 && is_alnum(s[i - 1])) continue;
    bool hit = true;
    for (std::size_t k = 0; k < word.size() && hit; ++k) hit = lower(s[i + k]) == word[k];
    if (hit) out.push_back(i);
  }
  return out;
}

// Does the token end here? A '.' ends it only as punctuation, not as a decimal point.
bool token_boundary(const Scanner& sc) {
  const char c = sc.peek();
  if (c == '.') return !is_digit(sc.peek(1));
  return !is_alnum(c);
}

// "patch <i> : level = <1|2> [,;]? box = [x1,y1,x2,y2]" starting after "patch".
struct ScaleMatch {
  std::optional<int> patch;
  std::optional<ScaleItem> item;
};

ScaleMatch match_scale_item(std::string_view s, std::size_t after_keyword) {
  Scanner sc(s, after_keyword);
  ScaleMatch m;
  sc.skip_ws();
  m.patch = sc.integer();
  if (!m.patch) return m;
  sc.skip_ws();
  if (!sc.eat(':')) return m;
  sc.skip_ws();
  if (!sc.eat_word("level")) return m;
  sc.skip_ws();
  if (!sc.eat('=')) return m;
  sc.skip_ws();
  auto level = sc.integer();
  if (!level || (*level != 1 && *level != 2) || !token_boundary(sc)) return m;
  sc.skip_ws();
  sc.eat_any(",;");
  sc.skip_ws();
  if (!sc.eat_word("box")) return m;
  sc.skip_ws();
  if (!sc.eat('=')) return m;
  sc.skip_ws();
  const bool bracket = sc.eat_any("[(");
  double v[4];
  for (int i = 0; i < 4; ++i) {
    sc.skip_ws();
    if (i > 0) {
      if (!sc.eat(',')) return m;
      sc.skip_ws();
    }
    auto x = sc.number();
    if (!x) return m;
    v[i] = *x;
  }
  sc.skip_ws();
  if (bracket && !sc.eat_any("])")) return m;
  if (!bracket && !token_boundary(sc)) return m;
  m.item = ScaleItem{*level, RawBox{v[0], v[1], v[2], v[3]}};
  return m;
}

void parse_scale(ParsedAnswer& p) {
  p.scale.assign(static_cast<std::size_t>(p.items), std::nullopt);
  for (std::size_t at : keyword_positions(p.body, "patch")) {
    const ScaleMatch m = match_scale_item(p.body, at + 5);
    if (!m.patch) continue;
    if (*m.patch < 1 || *m.patch > p.items) {
      p.arity_mismatch = true;
      continue;
    }
    // Later occurrences override earlier ones: the conclusion wins.
    p.scale[static_cast<std::size_t>(*m.patch - 1)] = m.item;
  }
  if (p.arity_mismatch) p.scale.assign(static_cast<std::size_t>(p.items), std::nullopt);
  for (int i = 0; i < p.items; ++i) p.item_validity[static_cast<std::size_t>(i)] = p.scale[static_cast<std::size_t>(i)].has_value();
}

void parse_order(ParsedAnswer& p) {
  p.order.assign(static_cast<std::size_t>(p.items), std::nullopt);
  const auto hits = keyword_positions(p.body, "order");
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    Scanner sc(p.body, *it + 5);
    sc.skip_ws();
    if (!sc.eat_any("=:")) continue;
    sc.skip_ws();
    const char open = sc.peek();
    const bool bracket = sc.eat_any("[(");
    const std::size_t start = sc.pos();
    std::size_t end = start;
    const std::string_view stop = bracket ? (open == '[' ? "]" : ")") : "\n";
    while (end < p.body.size() && stop.find(p.body[end]) == std::string_view::npos) ++end;
    std::string_view list = std::string_view(p.body).substr(start, end - start);

    std::vector<std::string_view> tokens;
    std::size_t from = 0;
    for (;;) {
      const std::size_t comma = list.find(',', from);
      tokens.push_back(list.substr(from, comma == std::string_view::npos ? std::string_view::npos : comma - from));
      if (comma == std::string_view::npos) break;
      from = comma + 1;
    }
    if (tokens.size() == 1 && tokens[0].find_first_not_of(" \t\r\n") == std::string_view::npos) tokens.clear();
    if (static_cast<int>(tokens.size()) != p.items) p.arity_mismatch = true;
    for (int i = 0; i < p.items && i < static_cast<int>(tokens.size()); ++i) {
      std::string_view t = tokens[static_cast<std::size_t>(i)];
      const auto a = t.find_first_not_of(" \t\r\n");
      if (a == std::string_view::npos) continue;
      t = t.substr(a, t.find_last_not_of(" \t\r\n") - a + 1);
      Scanner ts(t);
      auto v = ts.integer();
      if (v && ts.done()) p.order[static_cast<std::size_t>(i)] = *v;
    }
    break;
  }
  for (int i = 0; i < p.items; ++i)
    p.item_validity[static_cast<std::size_t>(i)] = p.order[static_cast<std::size_t>(i)].has_value();
}

void parse_index(ParsedAnswer& p) {
  const auto hits = keyword_positions(p.body, "index");
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    Scanner sc(p.body, *it + 5);
    sc.skip_ws();
    if (!sc.eat_any("=:")) continue;
    sc.skip_ws();
    auto v = sc.integer();
    if (v && token_boundary(sc)) p.index = *v;
    break;
  }
  if (p.items > 0) p.item_validity[0] = p.index.has_value();
}

}  // namespace

std::optional<std::string_view> match_cot_envelope(std::string_view text) {
  constexpr std::string_view tags[] = {"<think>", "</think>", "<answer>", "</answer>"};
  std::size_t pos[4];
  for (int i = 0; i < 4; ++i) {
    pos[i] = text.find(tags[i]);
    if (pos[i] == std::string_view::npos) return std::nullopt;
    if (text.find(tags[i], pos[i] + 1) != std::string_view::npos) return std::nullopt;
  }
  if (!(pos[0] < pos[1] && pos[1] < pos[2] && pos[2] < pos[3])) return std::nullopt;
  auto blank = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i)
      if (!is_space(text[i])) return false;
    return true;
  };
  if (!blank(0, pos[0])) return std::nullopt;
  if (!blank(pos[1] + tags[1].size(), pos[2])) return std::nullopt;
  if (!blank(pos[3] + tags[3].size(), text.size())) return std::nullopt;
  const std::size_t a = pos[2] + tags[2].size();
  return text.substr(a, pos[3] - a);
}

ParsedAnswer parse_answer(std::string_view text, TaskKind kind, int items, Mode mode) {
  ParsedAnswer p;
  p.kind = kind;
  p.items = std::max(items, 0);
  p.item_validity.assign(static_cast<std::size_t>(p.items), false);
  if (mode == Mode::Reasoning) {
    if (auto body = match_cot_envelope(text)) {
      p.cot_structure_ok = true;
      p.body = std::string(*body);
    } else {
      p.body = std::string(text);
    }
  } else {
    p.body = std::string(text);
  }
  switch (kind) {
    case TaskKind::Scale: parse_scale(p); break;
    case TaskKind::Topo: parse_order(p); break;
    case TaskKind::Anom: parse_index(p); break;
  }
  return p;
}

std::string format_decimal3(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string format_scale_answer(const std::vector<int>& levels, const std::vector<RawBox>& boxes) {
  std::string out;
  for (std::size_t i = 0; i < levels.size() && i < boxes.size(); ++i) {
    if (i) out += '\n';
    const RawBox& b = boxes[i];
    out += "patch " + std::to_string(i + 1) + ": level=" + std::to_string(levels[i]) + " box=[" +
           format_decimal3(b.x1) + "," + format_decimal3(b.y1) + "," + format_decimal3(b.x2) + "," +
           format_decimal3(b.y2) + "]";
  }
  return out;
}

std::string format_order_answer(const std::vector<int>& order) {
  std::string out = "order=[";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(order[i]);
  }
  return out + "]";
}

std::string format_index_answer(int index) { return "index=" + std::to_string(index); }

std::string wrap_reasoning(std::string_view think, std::string_view answer) {
  return "<think>" + std::string(think) + "</think><answer>" + std::string(answer) + "</answer>";
}

}  // namespace geoscout
