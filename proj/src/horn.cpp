#include <phylocsp/error.hpp>
#include <phylocsp/horn.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace phylo {

int AffineHornFormula::var_index(std::string_view name) const
{
    auto it = std::find(vars.begin(), vars.end(), name);
    return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

int AffineHornFormula::add_var(const std::string & name)
{
    int i = var_index(name);
    if (i >= 0)
        return i;
    if (! is_valid_label(name))
        throw Error("invalid variable name '" + name + "'");
    vars.push_back(name);
    return arity() - 1;
}

AffineHornClause phi_b(const BooleanRelation & b, std::vector<int> vars)
{
    if (static_cast<int>(vars.size()) != b.arity())
        throw Error("affine part needs one variable per coordinate");
    if (! is_affine(b.with_constants()))
        throw Error("split relation " + b.to_string() + " is not affine");
    AffineHornClause c;
    c.affine = AffinePart{std::move(vars), b};
    return c;
}

void check_affine_horn(const AffineHornFormula & f)
{
    auto in_range = [&](int v) { return v >= 0 && v < f.arity(); };
    for (const auto & c : f.clauses) {
        for (auto [u, v] : c.neq)
            if (! in_range(u) || ! in_range(v))
                throw Error("clause variable out of range");
        if (c.affine) {
            if (c.affine->vars.empty() || static_cast<int>(c.affine->vars.size()) != c.affine->b.arity())
                throw Error("affine part arity mismatch");
            for (int v : c.affine->vars)
                if (! in_range(v))
                    throw Error("clause variable out of range");
            if (! is_affine(c.affine->b.with_constants()))
                throw Error("split relation " + c.affine->b.to_string() + " is not affine");
        }
    }
}

bool affine_part_holds(const AffinePart & a, const Tree & t, std::span<const Tree::Node> nodes)
{
    const std::size_t n = a.vars.size();
    bool all_equal = true;
    for (std::size_t i = 1; i < n; ++i)
        all_equal = all_equal && nodes[a.vars[i]] == nodes[a.vars[0]];
    if (all_equal)
        return true;
    const BitVector ones = a.b.ones();
    std::vector<Tree::Node> side[2];
    for (BitVector s : a.b.vectors()) {
        if (s == 0 || s == ones)
            continue;
        side[0].clear();
        side[1].clear();
        for (std::size_t i = 0; i < n; ++i)
            side[s >> i & 1u].push_back(nodes[a.vars[i]]);
        if (t.clan_separated(side[0], side[1]))
            return true;
    }
    return false;
}

bool evaluate(const AffineHornClause & c, const Tree & t, std::span<const Tree::Node> nodes)
{
    for (auto [u, v] : c.neq)
        if (nodes[u] != nodes[v])
            return true;
    return c.affine && affine_part_holds(*c.affine, t, nodes);
}

bool evaluate(const AffineHornFormula & f, const Tree & t, std::span<const Tree::Node> nodes)
{
    return std::all_of(
        f.clauses.begin(), f.clauses.end(), [&](const AffineHornClause & c) { return evaluate(c, t, nodes); });
}

bool verify_solution(const AffineHornFormula & f, const Solution & sol)
{
    if (f.vars.empty())
        return sol.tree.empty() && f.clauses.empty();
    if (sol.tree.empty())
        return false;
    std::vector<Tree::Node> nodes;
    std::set<Tree::Node> used;
    for (const auto & v : f.vars) {
        auto it = sol.assignment.find(v);
        if (it == sol.assignment.end() || ! sol.tree.has_leaf(it->second))
            return false;
        nodes.push_back(sol.tree.leaf_node(it->second));
        used.insert(nodes.back());
    }
    if (used.size() != sol.tree.leaf_count())
        return false;
    return evaluate(f, sol.tree, nodes);
}

std::string to_string(const AffineHornClause & c, const std::vector<std::string> & vars)
{
    if (c.is_empty())
        return "false";
    std::string s;
    for (auto [u, v] : c.neq) {
        if (! s.empty())
            s += " or ";
        s += vars.at(u) + " != " + vars.at(v);
    }
    if (c.affine) {
        if (! s.empty())
            s += " or ";
        const auto & b = c.affine->b;
        const std::string set = b.to_string();
        s += "split{" + set.substr(1, set.size() - 2);
        s += b.empty() ? "on (" : " on (";
        for (std::size_t i = 0; i < c.affine->vars.size(); ++i)
            s += (i ? "," : "") + vars.at(c.affine->vars[i]);
        s += ")}";
    }
    return s;
}

std::string to_horn(const AffineHornFormula & f)
{
    std::ostringstream os;
    os << "vars";
    for (const auto & v : f.vars)
        os << " " << v;
    os << "\n";
    for (const auto & c : f.clauses)
        os << to_string(c, f.vars) << "\n";
    return os.str();
}

namespace {

class ClauseReader {
public:
    ClauseReader(std::string_view text, std::vector<std::string> & vars, int line, bool extend) :
        s_(text), vars_(vars), line_(line), extend_(extend)
    {
    }

    AffineHornClause read()
    {
        AffineHornClause c;
        skip();
        if (word() == "false") {
            pos_ += 5;
            skip();
            if (pos_ != s_.size())
                fail("'false' must stand alone");
            return c;
        }
        while (true) {
            skip();
            if (s_.substr(pos_, 6) == "split{") {
                if (c.affine)
                    fail("a clause has at most one split part");
                pos_ += 6;
                c.affine = read_split();
            }
            else {
                int u = read_var();
                skip();
                if (s_.substr(pos_, 2) != "!=")
                    fail("expected '!='");
                pos_ += 2;
                skip();
                int v = read_var();
                c.neq.emplace_back(u, v);
            }
            skip();
            if (pos_ == s_.size())
                break;
            if (word() != "or")
                fail("expected 'or'");
            pos_ += 2;
        }
        return c;
    }

private:
    AffinePart read_split()
    {
        std::vector<BitVector> vecs;
        std::size_t width = 0;
        bool have_width = false;
        skip();
        while (word() != "on") {
            std::string bits = word();
            if (bits.empty())
                fail("expected bit vector or 'on'");
            if (have_width && bits.size() != width)
                fail("bit vectors of different lengths");
            width = bits.size();
            have_width = true;
            try {
                vecs.push_back(bits_from_string(bits));
            }
            catch (const ParseError & e) {
                fail(e.what());
            }
            pos_ += bits.size();
            skip();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                skip();
            }
        }
        pos_ += 2;
        skip();
        expect('(');
        AffinePart a;
        while (true) {
            skip();
            a.vars.push_back(read_var());
            skip();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                continue;
            }
            break;
        }
        expect(')');
        skip();
        expect('}');
        if (have_width && width != a.vars.size())
            fail("bit vector length differs from the variable count");
        a.b = BooleanRelation(static_cast<int>(a.vars.size()), std::move(vecs));
        return a;
    }

    int read_var()
    {
        std::string w = word();
        if (w.empty())
            fail("expected variable");
        pos_ += w.size();
        auto it = std::find(vars_.begin(), vars_.end(), w);
        if (it != vars_.end())
            return static_cast<int>(it - vars_.begin());
        if (! extend_)
            fail("undeclared variable '" + w + "'");
        vars_.push_back(w);
        return static_cast<int>(vars_.size()) - 1;
    }

    std::string word() const
    {
        std::size_t e = pos_;
        while (e < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_'))
            ++e;
        return std::string(s_.substr(pos_, e - pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    void expect(char c)
    {
        if (pos_ >= s_.size() || s_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    [[noreturn]] void fail(const std::string & msg) const
    {
        throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::vector<std::string> & vars_;
    int line_;
    bool extend_;
};

template <typename Fn>
void for_each_line(std::string_view text, Fn && fn)
{
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        while (! line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
            line.remove_suffix(1);
        while (! line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
            line.remove_prefix(1);
        if (! line.empty())
            fn(line, line_no);
        start = end + 1;
    }
}

}  // namespace

AffineHornClause parse_clause(std::string_view text, std::vector<std::string> & vars, int line)
{
    return ClauseReader(text, vars, line, true).read();
}

AffineHornFormula parse_horn(std::string_view text)
{
    AffineHornFormula f;
    for_each_line(text, [&](std::string_view line, int line_no) {
        if (line.substr(0, 5) == "vars " || line == "vars") {
            std::istringstream is{std::string(line.substr(4))};
            std::string w;
            while (is >> w) {
                if (! is_valid_label(w))
                    throw ParseError("invalid variable name '" + w + "'", line_no, 1);
                f.add_var(w);
            }
            return;
        }
        f.clauses.push_back(ClauseReader(line, f.vars, line_no, true).read());
    });
    try {
        check_affine_horn(f);
    }
    catch (const ParseError &) {
        throw;
    }
    catch (const Error & e) {
        throw ParseError(e.what());
    }
    return f;
}

std::string to_certificates(const std::map<std::string, AffineHornFormula> & certs)
{
    std::ostringstream os;
    for (const auto & [name, f] : certs) {
        os << "cert " << name << "/" << f.arity() << "\n";
        for (const auto & c : f.clauses)
            os << to_string(c, f.vars) << "\n";
    }
    return os.str();
}

std::map<std::string, AffineHornFormula> parse_certificates(std::string_view text)
{
    std::map<std::string, AffineHornFormula> out;
    AffineHornFormula * cur = nullptr;
    for_each_line(text, [&](std::string_view line, int line_no) {
        if (line.substr(0, 5) == "cert ") {
            std::string_view rest = line.substr(5);
            auto slash = rest.find('/');
            if (slash == std::string_view::npos)
                throw ParseError("expected 'cert NAME/k'", line_no, 1);
            std::string name(rest.substr(0, slash));
            int k = 0;
            try {
                k = std::stoi(std::string(rest.substr(slash + 1)));
            }
            catch (const std::exception &) {
                throw ParseError("bad arity in certificate header", line_no, 1);
            }
            if (! is_valid_label(name) || k < 1)
                throw ParseError("bad certificate header", line_no, 1);
            if (out.count(name))
                throw ParseError("duplicate certificate '" + name + "'", line_no, 1);
            cur = &out[name];
            for (int i = 1; i <= k; ++i)
                cur->vars.push_back("x" + std::to_string(i));
            return;
        }
        if (! cur)
            throw ParseError("clause before any 'cert' header", line_no, 1);
        cur->clauses.push_back(ClauseReader(line, cur->vars, line_no, false).read());
    });
    for (const auto & [name, f] : out) {
        try {
            check_affine_horn(f);
        }
        catch (const Error & e) {
            throw ParseError("certificate " + name + ": " + e.what());
        }
    }
    return out;
}

}  // namespace phylo
