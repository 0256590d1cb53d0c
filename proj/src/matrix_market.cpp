#include "cbspmv/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "cbspmv/error.hpp"

namespace cbspmv {

namespace {

enum class Field { Real, Integer, Pattern };
enum class Symmetry { General, Symmetric, SkewSymmetric, Hermitian };

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw FormatError("Matrix Market line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
}

class Tokenizer {
public:
    explicit Tokenizer(const std::string& s) : cur_(s.c_str()), end_(s.c_str() + s.size()) {}

    std::string_view next() {
        while (cur_ < end_ && std::isspace(static_cast<unsigned char>(*cur_)))
            ++cur_;
        const char* b = cur_;
        while (cur_ < end_ && !std::isspace(static_cast<unsigned char>(*cur_)))
            ++cur_;
        return {b, static_cast<std::size_t>(cur_ - b)};
    }

    bool done() {
        while (cur_ < end_ && std::isspace(static_cast<unsigned char>(*cur_)))
            ++cur_;
        return cur_ == end_;
    }

private:
    const char* cur_;
    const char* end_;
};

bool parse_u64(std::string_view tok, std::uint64_t& out) {
    if (tok.empty())
        return false;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && p == tok.data() + tok.size();
}

bool parse_double(std::string_view tok, double& out) {
    if (tok.empty())
        return false;
    std::string s(tok);
    char* endp = nullptr;
    out = std::strtod(s.c_str(), &endp);
    return endp == s.c_str() + s.size();
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

TripletMatrix parse_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line))
        fail(1, "empty input, expected %%MatrixMarket banner");
    ++lineno;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    Tokenizer banner(line);
    if (lower(banner.next()) != "%%matrixmarket")
        fail(lineno, "malformed banner, expected '%%MatrixMarket'");
    if (lower(banner.next()) != "matrix")
        fail(lineno, "malformed banner, object must be 'matrix'");
    const std::string format = lower(banner.next());
    if (format == "array")
        fail(lineno, "array (dense) format is not supported");
    if (format != "coordinate")
        fail(lineno, "malformed banner, format must be 'coordinate'");

    const std::string field_tok = lower(banner.next());
    Field field;
    if (field_tok == "real" || field_tok == "double")
        field = Field::Real;
    else if (field_tok == "integer")
        field = Field::Integer;
    else if (field_tok == "pattern")
        field = Field::Pattern;
    else if (field_tok == "complex")
        fail(lineno, "complex matrices are not supported");
    else
        fail(lineno, "malformed banner, unknown field '" + field_tok + "'");

    const std::string sym_tok = lower(banner.next());
    Symmetry sym;
    if (sym_tok == "general")
        sym = Symmetry::General;
    else if (sym_tok == "symmetric")
        sym = Symmetry::Symmetric;
    else if (sym_tok == "skew-symmetric")
        sym = Symmetry::SkewSymmetric;
    else if (sym_tok == "hermitian")
        sym = Symmetry::Hermitian;
    else
        fail(lineno, "malformed banner, unknown symmetry '" + sym_tok + "'");

    // Size line: first non-comment, non-blank line.
    std::uint64_t rows = 0, cols = 0, declared = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line))
            continue;
        Tokenizer t(line);
        if (!parse_u64(t.next(), rows) || !parse_u64(t.next(), cols) ||
            !parse_u64(t.next(), declared) || !t.done())
            fail(lineno, "malformed size line, expected '<rows> <cols> <entries>'");
        have_size = true;
        break;
    }
    if (!have_size)
        fail(lineno, "missing size line");
    constexpr std::uint64_t max_dim = std::numeric_limits<Index>::max();
    if (rows > max_dim || cols > max_dim)
        fail(lineno, "matrix dimensions exceed 32-bit index range");
    if (sym != Symmetry::General && rows != cols)
        fail(lineno, "symmetric storage requires a square matrix");

    TripletMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.entries.reserve(sym == Symmetry::General ? declared : 2 * declared);

    std::uint64_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line))
            continue;
        if (seen == declared)
            fail(lineno, "entry count mismatch, more than the declared " +
                             std::to_string(declared) + " entries");
        Tokenizer t(line);
        std::uint64_t r = 0, c = 0;
        if (!parse_u64(t.next(), r) || !parse_u64(t.next(), c))
            fail(lineno, "malformed entry indices");
        if (r < 1 || r > rows || c < 1 || c > cols)
            fail(lineno, "index (" + std::to_string(r) + ", " + std::to_string(c) +
                             ") out of declared bounds " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        double v = 1.0;
        if (field != Field::Pattern) {
            if (!parse_double(t.next(), v))
                fail(lineno, "malformed entry value");
            if (!std::isfinite(v))
                fail(lineno, "non-finite value");
        }
        if (!t.done())
            fail(lineno, "trailing tokens after entry");

        const auto ri = static_cast<Index>(r - 1);
        const auto ci = static_cast<Index>(c - 1);
        m.entries.push_back({ri, ci, v});
        if (sym != Symmetry::General && ri != ci) {
            const double mirrored = sym == Symmetry::SkewSymmetric ? -v : v;
            m.entries.push_back({ci, ri, mirrored});
        }
        ++seen;
    }
    if (seen != declared)
        fail(lineno, "entry count mismatch, declared " + std::to_string(declared) +
                         " but found " + std::to_string(seen));

    canonicalize(m);
    return m;
}

TripletMatrix parse_matrix_market_string(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix_market(in);
}

TripletMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    try {
        return parse_matrix_market(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_matrix_market(std::ostream& out, const TripletMatrix& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.n_rows << ' ' << m.n_cols << ' ' << m.entries.size() << '\n';
    char buf[64];
    for (const auto& t : m.entries) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t.val, std::chars_format::general, 17);
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << std::string_view(buf, p - buf) << '\n';
    }
    if (!out)
        throw Error("failed writing Matrix Market output");
}

std::string write_matrix_market_string(const TripletMatrix& m) {
    std::ostringstream out;
    write_matrix_market(out, m);
    return out.str();
}

void write_matrix_market_file(const std::string& path, const TripletMatrix& m) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_matrix_market(out, m);
}

}  // namespace cbspmv
