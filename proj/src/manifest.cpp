#include "poppkit/manifest.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace poppkit {

const ManifoldSpec& Manifest::manifold(const std::string& name) const {
  auto it = manifolds.find(name);
  if (it == manifolds.end()) throw InputError("unknown manifold '" + name + "'");
  return *it->second;
}

const MapSpec& Manifest::map(const std::string& name) const {
  auto it = maps.find(name);
  if (it == maps.end()) throw InputError("unknown map '" + name + "'");
  return it->second;
}

namespace {

struct Value {
  enum class Kind { String, Number, Array };
  Kind kind = Kind::String;
  std::string text;
  std::vector<Value> items;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Entry {
  std::string key;
  Value value;
  std::size_t line = 0;
};

struct Section {
  std::string kind;  // "options", "manifold", "map"
  std::string name;
  std::size_t line = 0;
  std::vector<Entry> entries;
};

class Reader {
 public:
  Reader(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  std::vector<Section> read() {
    std::vector<Section> sections;
    for (;;) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        sections.push_back(read_header());
      } else {
        if (sections.empty()) fail("key outside of any section");
        sections.back().entries.push_back(read_entry());
      }
      end_of_line();
    }
    return sections;
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(message, line_, column_); }

  [[noreturn]] void fail_at(const std::string& message, std::size_t line, std::size_t column) const {
    throw ParseError(origin_ + ": " + message, line, column);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    if (peek() == '#')
      while (!at_end() && peek() != '\n') advance();
  }

  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      if (peek() != '\n') return;
      advance();
    }
  }

  void end_of_line() {
    skip_spaces();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    advance();
  }

  std::string read_name() {
    std::string name;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-')) {
      name.push_back(peek());
      advance();
    }
    if (name.empty()) fail("expected a name");
    return name;
  }

  Section read_header() {
    Section s;
    s.line = line_;
    advance();
    skip_spaces();
    s.kind = read_name();
    if (s.kind == "manifold" || s.kind == "map") {
      if (peek() != '.') fail("expected '." + std::string("NAME' after '") + s.kind + "'");
      advance();
      s.name = read_name();
    } else if (s.kind != "options") {
      fail_at("unknown section '" + s.kind + "'", s.line, 2);
    }
    skip_spaces();
    if (peek() != ']') fail("expected ']'");
    advance();
    return s;
  }

  Entry read_entry() {
    Entry e;
    e.line = line_;
    e.key = read_name();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + e.key + "'");
    advance();
    skip_spaces();
    e.value = read_value();
    return e;
  }

  void skip_inside_array() {
    for (;;) {
      skip_spaces();
      if (peek() != '\n') return;
      advance();
    }
  }

  Value read_value() {
    Value v;
    v.line = line_;
    v.column = column_;
    if (at_end() || peek() == '\n') fail("missing value");
    if (peek() == '"') {
      advance();
      v.column = column_;
      while (!at_end() && peek() != '"') {
        if (peek() == '\n') fail_at("unterminated string", v.line, v.column - 1);
        v.text.push_back(peek());
        advance();
      }
      if (at_end()) fail_at("unterminated string", v.line, v.column - 1);
      advance();
      return v;
    }
    if (peek() == '[') {
      v.kind = Value::Kind::Array;
      advance();
      skip_inside_array();
      while (peek() != ']') {
        v.items.push_back(read_value());
        skip_inside_array();
        if (peek() == ',') {
          advance();
          skip_inside_array();
        } else if (peek() != ']') {
          if (at_end()) fail_at("unterminated array", v.line, v.column);
          fail("expected ',' or ']'");
        }
      }
      advance();
      return v;
    }
    v.kind = Value::Kind::Number;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
                         peek() == '-' || peek() == '+' || peek() == '/')) {
      v.text.push_back(peek());
      advance();
    }
    if (v.text.empty()) fail(std::string("unexpected character '") + peek() + "'");
    return v;
  }

  std::string_view text_;
  std::string origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Builder {
 public:
  explicit Builder(const Reader& reader) : reader_(reader) {}

  [[noreturn]] void fail(const std::string& message, const Value& at) const {
    reader_.fail_at(message, at.line, at.column);
  }

  std::string scalar(const Value& v, const std::string& what) const {
    if (v.kind == Value::Kind::Array) fail(what + " must be a scalar", v);
    return v.text;
  }

  std::string string(const Value& v, const std::string& what) const {
    if (v.kind != Value::Kind::String) fail(what + " must be a quoted string", v);
    return v.text;
  }

  const std::vector<Value>& array(const Value& v, const std::string& what) const {
    if (v.kind != Value::Kind::Array) fail(what + " must be an array", v);
    return v.items;
  }

  std::vector<std::string> scalars(const Value& v, const std::string& what) const {
    std::vector<std::string> out;
    for (const auto& item : array(v, what)) out.push_back(scalar(item, what + " entry"));
    return out;
  }

  std::vector<std::vector<std::string>> table(const Value& v, const std::string& what) const {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : array(v, what)) out.push_back(scalars(row, what + " row"));
    return out;
  }

  double real(const Value& v, const std::string& what) const {
    const std::string text = scalar(v, what);
    try {
      std::size_t used = 0;
      const double d = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return d;
    } catch (const std::exception&) {
      fail(what + " must be a number, got '" + text + "'", v);
    }
  }

  std::uint64_t count(const Value& v, const std::string& what) const {
    const std::string text = scalar(v, what);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(what + " must be a nonnegative integer, got '" + text + "'", v);
    }
    return out;
  }

  // Re-anchors polynomial and rational parse errors at the value's position.
  template <class F>
  auto located(const Value& v, F&& f) const {
    try {
      return f();
    } catch (const ParseError& e) {
      std::string message = e.what();
      const auto cut = message.rfind(" (at column");
      if (cut != std::string::npos) message.resize(cut);
      reader_.fail_at(message, v.line, v.column + (e.column() > 0 ? e.column() - 1 : 0));
    }
  }

  // Walks a table value and its parsed strings in parallel to locate errors.
  void check_table(const Value& v, const std::vector<std::string>& vars, bool rational) const {
    for (const auto& row : v.items)
      for (const auto& cell : row.items)
        located(cell, [&] {
          if (rational) {
            parse_rational(cell.text);
          } else {
            parse_polynomial(cell.text, vars);
          }
          return 0;
        });
  }

 private:
  const Reader& reader_;
};

const Value* find(const Section& s, const std::string& key) {
  for (const auto& e : s.entries)
    if (e.key == key) return &e.value;
  return nullptr;
}

void check_keys(const Reader& reader, const Section& s, std::initializer_list<const char*> allowed) {
  for (const auto& e : s.entries) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || e.key == a;
    if (!ok) reader.fail_at("unknown key '" + e.key + "' in [" + s.kind + (s.name.empty() ? "" : "." + s.name) + "]", e.line, 1);
    int seen = 0;
    for (const auto& other : s.entries) seen += other.key == e.key;
    if (seen > 1) reader.fail_at("duplicate key '" + e.key + "'", e.line, 1);
  }
}

const Value& require(const Reader& reader, const Section& s, const std::string& key) {
  const Value* v = find(s, key);
  if (!v) reader.fail_at("[" + s.kind + "." + s.name + "] is missing '" + key + "'", s.line, 1);
  return *v;
}

}  // namespace

Manifest parse_manifest_text(std::string_view text, const std::string& origin) {
  Reader reader(text, origin);
  const std::vector<Section> sections = reader.read();
  Builder b(reader);
  Manifest m;
  bool pairs_given = false;

  for (const auto& s : sections) {
    if (s.kind == "options") {
      check_keys(reader, s, {"tol", "seed", "random_pairs", "frames", "contact_tol"});
      if (const Value* v = find(s, "tol")) m.options.tol = b.real(*v, "tol");
      if (const Value* v = find(s, "seed")) m.options.seed = b.count(*v, "seed");
      if (const Value* v = find(s, "random_pairs")) {
        m.options.random_pairs = b.count(*v, "random_pairs");
        pairs_given = true;
      }
      if (const Value* v = find(s, "frames")) m.options.frames = b.count(*v, "frames");
      if (const Value* v = find(s, "contact_tol")) m.options.contact_tol = b.real(*v, "contact_tol");
      if (!(m.options.tol > 0.0)) reader.fail_at("tol must be positive", s.line, 1);
      if (m.options.contact_tol < 0.0) reader.fail_at("contact_tol must be nonnegative", s.line, 1);
    }
  }
  if (pairs_given && m.options.random_pairs > 0 && !m.options.seed) {
    throw InputError(origin + ": random_pairs requested without a seed");
  }

  for (const auto& s : sections) {
    if (s.kind != "manifold") continue;
    check_keys(reader, s, {"coordinates", "frame", "metric", "points"});
    if (m.manifolds.count(s.name)) reader.fail_at("duplicate manifold '" + s.name + "'", s.line, 1);
    const Value& coords_v = require(reader, s, "coordinates");
    std::vector<std::string> coords;
    for (const auto& c : b.array(coords_v, "coordinates")) coords.push_back(b.string(c, "coordinate"));
    const Value& frame_v = require(reader, s, "frame");
    const auto frame = b.table(frame_v, "frame");
    b.check_table(frame_v, coords, false);
    std::vector<std::vector<std::string>> metric;
    if (const Value* v = find(s, "metric")) {
      metric = b.table(*v, "metric");
      b.check_table(*v, coords, false);
    }
    const Value& points_v = require(reader, s, "points");
    const auto points = b.table(points_v, "points");
    b.check_table(points_v, coords, true);
    auto spec = std::make_shared<ManifoldSpec>(make_manifold(s.name, coords, frame, metric, points));
    m.manifolds.emplace(s.name, std::move(spec));
    m.manifold_order.push_back(s.name);
  }

  for (const auto& s : sections) {
    if (s.kind != "map") continue;
    check_keys(reader, s, {"source", "target", "components", "points"});
    if (m.maps.count(s.name)) reader.fail_at("duplicate map '" + s.name + "'", s.line, 1);
    const Value& source_v = require(reader, s, "source");
    const Value& target_v = require(reader, s, "target");
    const std::string source = b.string(source_v, "source");
    const std::string target = b.string(target_v, "target");
    auto src = m.manifolds.find(source);
    if (src == m.manifolds.end()) {
      throw InputError("map '" + s.name + "': undefined source manifold '" + source + "'");
    }
    auto tgt = m.manifolds.find(target);
    if (tgt == m.manifolds.end()) {
      throw InputError("map '" + s.name + "': undefined target manifold '" + target + "'");
    }
    const Value& comps_v = require(reader, s, "components");
    std::vector<Polynomial> comps;
    for (const auto& c : b.array(comps_v, "components")) {
      const std::string text = b.scalar(c, "component");
      comps.push_back(b.located(c, [&] { return parse_polynomial(text, src->second->coordinates); }));
    }
    std::vector<Point> points;
    if (const Value* v = find(s, "points")) {
      b.check_table(*v, {}, true);
      for (const auto& row : b.table(*v, "points")) {
        Point p;
        for (const auto& x : row) p.push_back(parse_rational(x));
        points.push_back(std::move(p));
      }
    }
    m.maps.emplace(s.name, make_map(s.name, src->second, tgt->second, std::move(comps), std::move(points)));
    m.map_order.push_back(s.name);
  }
  return m;
}

Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read manifest '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest_text(buffer.str(), path.string());
}

Manifest bundled_manifest() { return parse_manifest_text(bundled_manifest_text(), "bundled"); }

}  // namespace poppkit
