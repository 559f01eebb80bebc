#include <phylocsp/error.hpp>
#include <phylocsp/formula.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace phylo {

Formula Formula::truth(bool value)
{
    Formula f;
    f.op = value ? Op::True : Op::False;
    return f;
}

Formula Formula::cone(int x, int y, int z)
{
    Formula f;
    f.op = Op::Cone;
    f.args = {x, y, z};
    return f;
}

Formula Formula::eq(int x, int y)
{
    Formula f;
    f.op = Op::Eq;
    f.args = {x, y, 0};
    return f;
}

Formula Formula::neq(int x, int y)
{
    return negate(eq(x, y));
}

Formula Formula::negate(Formula g)
{
    Formula f;
    f.op = Op::Not;
    f.kids.push_back(std::move(g));
    return f;
}

Formula Formula::conj(std::vector<Formula> kids)
{
    if (kids.size() == 1)
        return std::move(kids[0]);
    Formula f;
    f.op = Op::And;
    f.kids = std::move(kids);
    return f;
}

Formula Formula::disj(std::vector<Formula> kids)
{
    if (kids.size() == 1)
        return std::move(kids[0]);
    Formula f;
    f.op = Op::Or;
    f.kids = std::move(kids);
    return f;
}

namespace {

Formula nnf(const Formula & f, bool negated)
{
    using Op = Formula::Op;
    switch (f.op) {
    case Op::True:
    case Op::False:
        return Formula::truth((f.op == Op::True) != negated);
    case Op::Cone:
    case Op::Eq:
        return negated ? Formula::negate(f) : f;
    case Op::Not:
        return nnf(f.kids[0], ! negated);
    case Op::And:
    case Op::Or: {
        std::vector<Formula> kids;
        for (const auto & k : f.kids)
            kids.push_back(nnf(k, negated));
        bool is_and = (f.op == Op::And) != negated;
        Formula g;
        g.op = is_and ? Op::And : Op::Or;
        g.kids = std::move(kids);
        return g;
    }
    }
    return f;
}

}  // namespace

Formula to_nnf(const Formula & f)
{
    return nnf(f, false);
}

int variable_bound(const Formula & f)
{
    using Op = Formula::Op;
    int m = 0;
    if (f.op == Op::Cone)
        m = std::max({f.args[0], f.args[1], f.args[2]}) + 1;
    else if (f.op == Op::Eq)
        m = std::max(f.args[0], f.args[1]) + 1;
    for (const auto & k : f.kids)
        m = std::max(m, variable_bound(k));
    return m;
}

bool evaluate(const Formula & f, const Tree & t, std::span<const Tree::Node> nodes)
{
    using Op = Formula::Op;
    switch (f.op) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Cone:
        return t.cone(nodes[f.args[0]], nodes[f.args[1]], nodes[f.args[2]]);
    case Op::Eq:
        return nodes[f.args[0]] == nodes[f.args[1]];
    case Op::Not:
        return ! evaluate(f.kids[0], t, nodes);
    case Op::And:
        return std::all_of(f.kids.begin(), f.kids.end(), [&](const Formula & k) { return evaluate(k, t, nodes); });
    case Op::Or:
        return std::any_of(f.kids.begin(), f.kids.end(), [&](const Formula & k) { return evaluate(k, t, nodes); });
    }
    return false;
}

bool evaluate(const PhyloFormula & f, const Tree & t, const std::map<std::string, std::string> & assignment)
{
    std::vector<Tree::Node> nodes;
    for (const auto & v : f.vars) {
        auto it = assignment.find(v);
        if (it == assignment.end())
            throw Error("unbound variable '" + v + "'");
        nodes.push_back(t.leaf_node(it->second));
    }
    return evaluate(f.body, t, nodes);
}

namespace {

bool is_compound(const Formula & f)
{
    return f.op == Formula::Op::And || f.op == Formula::Op::Or;
}

void print(std::ostream & os, const Formula & f, const std::vector<std::string> & vars)
{
    using Op = Formula::Op;
    auto var = [&](int i) -> const std::string & { return vars.at(i); };
    switch (f.op) {
    case Op::True:
        os << "true";
        break;
    case Op::False:
        os << "false";
        break;
    case Op::Cone:
        os << "cone(" << var(f.args[0]) << "," << var(f.args[1]) << "," << var(f.args[2]) << ")";
        break;
    case Op::Eq:
        os << var(f.args[0]) << " = " << var(f.args[1]);
        break;
    case Op::Not: {
        const Formula & k = f.kids[0];
        if (k.op == Op::Eq)
            os << var(k.args[0]) << " != " << var(k.args[1]);
        else if (k.op == Op::Cone || k.op == Op::True || k.op == Op::False) {
            os << "not ";
            print(os, k, vars);
        }
        else {
            os << "not (";
            print(os, k, vars);
            os << ")";
        }
        break;
    }
    case Op::And:
    case Op::Or: {
        if (f.kids.empty()) {
            os << (f.op == Op::And ? "true" : "false");
            break;
        }
        const char * sep = f.op == Op::And ? " and " : " or ";
        for (std::size_t i = 0; i < f.kids.size(); ++i) {
            if (i)
                os << sep;
            if (is_compound(f.kids[i])) {
                os << "(";
                print(os, f.kids[i], vars);
                os << ")";
            }
            else
                print(os, f.kids[i], vars);
        }
        break;
    }
    }
}

struct Token {
    enum class Kind { Ident, Int, LParen, RParen, Comma, Eq, Neq, Slash, Assign, End };
    Kind kind;
    std::string text;
    int line;
    int col;
};

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        int l = line, cl = col;
        auto simple = [&](Token::Kind k, std::size_t len) {
            out.push_back({k, std::string(text.substr(i, len)), l, cl});
            advance(len);
        };
        if (c == '(')
            simple(Token::Kind::LParen, 1);
        else if (c == ')')
            simple(Token::Kind::RParen, 1);
        else if (c == ',')
            simple(Token::Kind::Comma, 1);
        else if (c == '/')
            simple(Token::Kind::Slash, 1);
        else if (c == '=')
            simple(Token::Kind::Eq, 1);
        else if (c == '!' && i + 1 < text.size() && text[i + 1] == '=')
            simple(Token::Kind::Neq, 2);
        else if (c == ':' && i + 1 < text.size() && text[i + 1] == '=')
            simple(Token::Kind::Assign, 2);
        else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            bool digits = true;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
                digits = digits && std::isdigit(static_cast<unsigned char>(text[j]));
                ++j;
            }
            simple(digits ? Token::Kind::Int : Token::Kind::Ident, j - i);
        }
        else
            throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

class FormulaParser {
public:
    FormulaParser(const std::vector<Token> & toks, std::size_t pos, const std::vector<std::string> & vars) :
        toks_(toks), pos_(pos), vars_(vars)
    {
    }

    Formula parse_disj()
    {
        std::vector<Formula> kids{parse_conj()};
        while (is_keyword("or")) {
            ++pos_;
            kids.push_back(parse_conj());
        }
        return Formula::disj(std::move(kids));
    }

    std::size_t pos() const { return pos_; }
    const Token & peek() const { return toks_[pos_]; }

    [[noreturn]] void fail(const std::string & msg) const { throw ParseError(msg, peek().line, peek().col); }

private:
    Formula parse_conj()
    {
        std::vector<Formula> kids{parse_lit()};
        while (is_keyword("and")) {
            ++pos_;
            kids.push_back(parse_lit());
        }
        return Formula::conj(std::move(kids));
    }

    Formula parse_lit()
    {
        if (is_keyword("not")) {
            ++pos_;
            return Formula::negate(parse_lit());
        }
        if (peek().kind == Token::Kind::LParen) {
            ++pos_;
            Formula f = parse_disj();
            expect(Token::Kind::RParen, "')'");
            return f;
        }
        if (is_keyword("true") || is_keyword("false")) {
            bool v = peek().text == "true";
            ++pos_;
            return Formula::truth(v);
        }
        if (is_keyword("cone")) {
            ++pos_;
            expect(Token::Kind::LParen, "'(' after cone");
            int x = parse_var();
            expect(Token::Kind::Comma, "','");
            int y = parse_var();
            expect(Token::Kind::Comma, "','");
            int z = parse_var();
            expect(Token::Kind::RParen, "')'");
            return Formula::cone(x, y, z);
        }
        int x = parse_var();
        if (peek().kind == Token::Kind::Eq) {
            ++pos_;
            return Formula::eq(x, parse_var());
        }
        if (peek().kind == Token::Kind::Neq) {
            ++pos_;
            return Formula::neq(x, parse_var());
        }
        fail("expected '=' or '!=' after variable");
    }

    int parse_var()
    {
        const Token & t = peek();
        if (t.kind != Token::Kind::Ident)
            fail("expected variable");
        auto it = std::find(vars_.begin(), vars_.end(), t.text);
        if (it == vars_.end())
            fail("undeclared variable '" + t.text + "'");
        ++pos_;
        return static_cast<int>(it - vars_.begin());
    }

    bool is_keyword(std::string_view kw) const
    {
        return peek().kind == Token::Kind::Ident && peek().text == kw;
    }

    void expect(Token::Kind k, const char * what)
    {
        if (peek().kind != k)
            fail(std::string("expected ") + what);
        ++pos_;
    }

    const std::vector<Token> & toks_;
    std::size_t pos_;
    const std::vector<std::string> & vars_;
};

std::vector<std::string> standard_vars(int k)
{
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i)
        v.push_back("x" + std::to_string(i));
    return v;
}

RelationDef make_builtin(const std::string & name, int arity, std::string_view body)
{
    RelationDef r;
    r.name = name;
    r.def.vars = standard_vars(arity);
    r.def.body = parse_formula(body, r.def.vars);
    r.builtin = true;
    return r;
}

}  // namespace

std::string to_string(const Formula & f, const std::vector<std::string> & vars)
{
    std::ostringstream os;
    print(os, f, vars);
    return os.str();
}

Formula parse_formula(std::string_view text, const std::vector<std::string> & vars)
{
    auto toks = tokenize(text);
    FormulaParser p(toks, 0, vars);
    Formula f = p.parse_disj();
    if (p.peek().kind != Token::Kind::End)
        p.fail("unexpected token '" + p.peek().text + "'");
    return f;
}

const std::vector<RelationDef> & builtin_relations()
{
    static const std::vector<RelationDef> rels = [] {
        const std::string quartet = "(cone(x3,x1,x2) and cone(x4,x1,x2)) or (cone(x1,x3,x4) and cone(x2,x3,x4))";
        const std::string forbidden = "cone(x3,x1,x2) or cone(x1,x2,x3)";
        return std::vector<RelationDef>{
            make_builtin("C", 3, "cone(x1,x2,x3)"),
            make_builtin("Cd", 3, "cone(x1,x2,x3) and x2 != x3"),
            make_builtin("Q", 4, quartet),
            make_builtin("Qd", 4, "(" + quartet + ") and x1 != x2 and x3 != x4"),
            make_builtin("N", 3, forbidden),
            make_builtin("Nd", 3, "(" + forbidden + ") and x1 != x2 and x2 != x3"),
            make_builtin("Eq", 2, "x1 = x2"),
            make_builtin("Neq", 2, "x1 != x2"),
        };
    }();
    return rels;
}

void ConstraintLanguage::add(RelationDef rel)
{
    if (! is_valid_label(rel.name))
        throw Error("invalid relation name '" + rel.name + "'");
    for (const auto & b : builtin_relations())
        if (b.name == rel.name && ! rel.builtin)
            throw Error("relation name '" + rel.name + "' clashes with a builtin");
    for (const auto & d : declared_)
        if (d.name == rel.name)
            throw Error("duplicate relation '" + rel.name + "'");
    if (variable_bound(rel.def.body) > rel.arity())
        throw Error("relation '" + rel.name + "' uses undeclared variables");
    declared_.push_back(std::move(rel));
}

const RelationDef * ConstraintLanguage::find(std::string_view name) const
{
    for (const auto & d : declared_)
        if (d.name == name)
            return &d;
    for (const auto & b : builtin_relations())
        if (b.name == name)
            return &b;
    return nullptr;
}

const RelationDef & ConstraintLanguage::get(std::string_view name) const
{
    const RelationDef * r = find(name);
    if (! r)
        throw Error("unknown relation symbol '" + std::string(name) + "'");
    return *r;
}

ConstraintLanguage ConstraintLanguage::of_builtins(const std::vector<std::string> & names)
{
    ConstraintLanguage lang;
    for (const auto & n : names) {
        const RelationDef * r = nullptr;
        for (const auto & b : builtin_relations())
            if (b.name == n)
                r = &b;
        if (! r)
            throw Error("unknown builtin '" + n + "'");
        lang.add(*r);
    }
    return lang;
}

ConstraintLanguage parse_language(std::string_view text)
{
    auto toks = tokenize(text);
    ConstraintLanguage lang;
    std::size_t pos = 0;
    auto fail = [&](const std::string & msg) -> void { throw ParseError(msg, toks[pos].line, toks[pos].col); };
    while (toks[pos].kind != Token::Kind::End) {
        if (toks[pos].kind == Token::Kind::Ident && toks[pos].text == "use") {
            // "use C, Q" declares builtins so they are classified with the file
            do {
                ++pos;
                if (toks[pos].kind != Token::Kind::Ident)
                    fail("expected builtin name");
                try {
                    ConstraintLanguage one = ConstraintLanguage::of_builtins({toks[pos].text});
                    for (const auto & r : one.declared())
                        lang.add(r);
                }
                catch (const ParseError &) {
                    throw;
                }
                catch (const Error & e) {
                    fail(e.what());
                }
                ++pos;
            } while (toks[pos].kind == Token::Kind::Comma);
            continue;
        }
        if (! (toks[pos].kind == Token::Kind::Ident && toks[pos].text == "rel"))
            fail("expected 'rel' or 'use'");
        ++pos;
        if (toks[pos].kind != Token::Kind::Ident)
            fail("expected relation name");
        const Token & name_tok = toks[pos];
        std::string name = toks[pos++].text;
        if (toks[pos].kind != Token::Kind::Slash)
            fail("expected '/' after relation name");
        ++pos;
        if (toks[pos].kind != Token::Kind::Int)
            fail("expected arity");
        int arity = std::stoi(toks[pos++].text);
        if (arity < 1)
            fail("arity must be positive");
        if (toks[pos].kind != Token::Kind::Assign)
            fail("expected ':='");
        ++pos;
        RelationDef r;
        r.name = name;
        r.def.vars = standard_vars(arity);
        FormulaParser p(toks, pos, r.def.vars);
        r.def.body = p.parse_disj();
        pos = p.pos();
        try {
            lang.add(std::move(r));
        }
        catch (const ParseError &) {
            throw;
        }
        catch (const Error & e) {
            throw ParseError(e.what(), name_tok.line, name_tok.col);
        }
    }
    return lang;
}

std::string to_phl(const ConstraintLanguage & lang)
{
    std::ostringstream os;
    for (const auto & r : lang.declared())
        if (r.builtin)
            os << "use " << r.name << "\n";
        else
            os << "rel " << r.name << "/" << r.arity() << " := " << to_string(r.def.body, r.def.vars) << "\n";
    return os.str();
}

int Instance::var_index(std::string_view name) const
{
    auto it = std::find(vars.begin(), vars.end(), name);
    return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

int Instance::add_var(const std::string & name)
{
    int i = var_index(name);
    if (i >= 0)
        return i;
    if (! is_valid_label(name))
        throw Error("invalid variable name '" + name + "'");
    vars.push_back(name);
    return static_cast<int>(vars.size()) - 1;
}

namespace {

std::string_view trim(std::string_view s)
{
    while (! s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (! s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string w;
    while (is >> w)
        out.push_back(w);
    return out;
}

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
        line = trim(line);
        if (! line.empty())
            fn(line, line_no);
        start = end + 1;
    }
}

}  // namespace

void check_instance(const Instance & inst, const ConstraintLanguage & lang)
{
    for (const auto & c : inst.constraints) {
        const RelationDef & r = lang.get(c.relation);
        if (static_cast<int>(c.args.size()) != r.arity())
            throw Error("constraint " + c.relation + " has " + std::to_string(c.args.size())
                + " arguments, relation arity is " + std::to_string(r.arity()));
        for (int a : c.args)
            if (a < 0 || a >= static_cast<int>(inst.vars.size()))
                throw Error("constraint argument out of range");
    }
}

Instance parse_instance(std::string_view text, const ConstraintLanguage * lang)
{
    Instance inst;
    bool seen_constraint = false;
    for_each_line(text, [&](std::string_view line, int line_no) {
        auto words = split_ws(line);
        if (words[0] == "language") {
            if (words.size() != 2 || seen_constraint || inst.language_file)
                throw ParseError("'language FILE' must be a single header line", line_no, 1);
            inst.language_file = words[1];
            return;
        }
        if (words[0] == "vars") {
            for (std::size_t i = 1; i < words.size(); ++i)
                inst.add_var(words[i]);
            return;
        }
        auto open = line.find('(');
        if (open == std::string_view::npos || line.back() != ')')
            throw ParseError("expected NAME(v1,...,vk)", line_no, 1);
        std::string name(trim(line.substr(0, open)));
        if (! is_valid_label(name))
            throw ParseError("invalid relation name '" + name + "'", line_no, 1);
        Constraint c;
        c.relation = name;
        std::string_view inner = line.substr(open + 1, line.size() - open - 2);
        std::size_t s = 0;
        while (true) {
            std::size_t comma = inner.find(',', s);
            std::string_view arg = trim(inner.substr(s, comma == std::string_view::npos ? inner.npos : comma - s));
            if (! is_valid_label(arg))
                throw ParseError("invalid argument '" + std::string(arg) + "'", line_no,
                    static_cast<int>(open + 2 + s));
            c.args.push_back(inst.add_var(std::string(arg)));
            if (comma == std::string_view::npos)
                break;
            s = comma + 1;
        }
        if (lang) {
            const RelationDef * r = lang->find(name);
            if (! r)
                throw ParseError("unknown relation symbol '" + name + "'", line_no, 1);
            if (r->arity() != static_cast<int>(c.args.size()))
                throw ParseError("arity mismatch for " + name + ": expected " + std::to_string(r->arity())
                        + ", got " + std::to_string(c.args.size()),
                    line_no, 1);
        }
        inst.constraints.push_back(std::move(c));
        seen_constraint = true;
    });
    return inst;
}

Instance parse_triples(std::string_view text)
{
    Instance inst;
    for_each_line(text, [&](std::string_view line, int line_no) {
        auto bar = line.find('|');
        if (bar == std::string_view::npos || line.find('|', bar + 1) != std::string_view::npos)
            throw ParseError("expected 'x y | z'", line_no, 1);
        auto left = split_ws(line.substr(0, bar));
        auto right = split_ws(line.substr(bar + 1));
        if (left.size() != 2 || right.size() != 1)
            throw ParseError("expected 'x y | z'", line_no, 1);
        for (const auto & w : {left[0], left[1], right[0]})
            if (! is_valid_label(w))
                throw ParseError("invalid variable name '" + w + "'", line_no, 1);
        int x = inst.add_var(left[0]);
        int y = inst.add_var(left[1]);
        int z = inst.add_var(right[0]);
        inst.constraints.push_back({"C", {z, x, y}});
    });
    return inst;
}

std::string to_phy(const Instance & inst)
{
    std::ostringstream os;
    if (inst.language_file)
        os << "language " << *inst.language_file << "\n";
    if (! inst.vars.empty()) {
        os << "vars";
        for (const auto & v : inst.vars)
            os << " " << v;
        os << "\n";
    }
    for (const auto & c : inst.constraints) {
        os << c.relation << "(";
        for (std::size_t i = 0; i < c.args.size(); ++i)
            os << (i ? "," : "") << inst.vars.at(c.args[i]);
        os << ")\n";
    }
    return os.str();
}

bool verify_solution(const Instance & inst, const ConstraintLanguage & lang, const Solution & sol)
{
    if (inst.vars.empty())
        return sol.tree.empty() && inst.constraints.empty();
    if (sol.tree.empty())
        return false;
    std::vector<Tree::Node> node_of(inst.vars.size(), Tree::none);
    std::set<Tree::Node> used;
    for (std::size_t i = 0; i < inst.vars.size(); ++i) {
        auto it = sol.assignment.find(inst.vars[i]);
        if (it == sol.assignment.end() || ! sol.tree.has_leaf(it->second))
            return false;
        node_of[i] = sol.tree.leaf_node(it->second);
        used.insert(node_of[i]);
    }
    if (used.size() != sol.tree.leaf_count())
        return false;
    std::vector<Tree::Node> args;
    for (const auto & c : inst.constraints) {
        const RelationDef & r = lang.get(c.relation);
        if (static_cast<int>(c.args.size()) != r.arity())
            return false;
        args.clear();
        for (int a : c.args)
            args.push_back(node_of.at(a));
        if (! evaluate(r.def.body, sol.tree, args))
            return false;
    }
    return true;
}

std::string to_mapping(const Solution & sol)
{
    std::ostringstream os;
    for (const auto & [var, leaf] : sol.assignment)
        os << var << " -> " << leaf << "\n";
    return os.str();
}

}  // namespace phylo
