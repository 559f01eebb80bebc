#include <phylocsp/error.hpp>
#include <phylocsp/splits.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace phylo {

std::string bits_to_string(BitVector v, int n)
{
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
        if (v >> i & 1u)
            s[i] = '1';
    return s;
}

BitVector bits_from_string(std::string_view s)
{
    if (s.size() > static_cast<std::size_t>(max_boolean_arity))
        throw ParseError("bit vector longer than " + std::to_string(max_boolean_arity));
    BitVector v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            v |= 1u << i;
        else if (s[i] != '0')
            throw ParseError("bit vector '" + std::string(s) + "' must contain only 0 and 1");
    }
    return v;
}

BooleanRelation::BooleanRelation(int arity) : arity_(arity)
{
    if (arity < 0 || arity > max_boolean_arity)
        throw BoundError("boolean relation arity " + std::to_string(arity) + " out of range");
}

BooleanRelation::BooleanRelation(int arity, std::vector<BitVector> vectors) : BooleanRelation(arity)
{
    for (BitVector v : vectors)
        if (v & ~ones())
            throw Error("vector wider than relation arity");
    std::sort(vectors.begin(), vectors.end());
    vectors.erase(std::unique(vectors.begin(), vectors.end()), vectors.end());
    vecs_ = std::move(vectors);
}

bool BooleanRelation::contains(BitVector v) const
{
    return std::binary_search(vecs_.begin(), vecs_.end(), v);
}

void BooleanRelation::insert(BitVector v)
{
    if (v & ~ones())
        throw Error("vector wider than relation arity");
    auto it = std::lower_bound(vecs_.begin(), vecs_.end(), v);
    if (it == vecs_.end() || *it != v)
        vecs_.insert(it, v);
}

BooleanRelation BooleanRelation::with_constants() const
{
    BooleanRelation r = *this;
    r.insert(0);
    r.insert(ones());
    return r;
}

BooleanRelation BooleanRelation::without_constants() const
{
    BooleanRelation r(arity_);
    for (BitVector v : vecs_)
        if (v != 0 && v != ones())
            r.vecs_.push_back(v);
    return r;
}

BooleanRelation BooleanRelation::select(std::span<const int> idx) const
{
    BooleanRelation r(static_cast<int>(idx.size()));
    std::vector<BitVector> out;
    for (BitVector v : vecs_) {
        BitVector w = 0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (v >> idx[i] & 1u)
                w |= 1u << i;
        out.push_back(w);
    }
    return BooleanRelation(static_cast<int>(idx.size()), std::move(out));
}

std::string BooleanRelation::to_string() const
{
    std::vector<std::string> parts;
    for (BitVector v : vecs_)
        parts.push_back(bits_to_string(v, arity_));
    std::sort(parts.begin(), parts.end());
    std::string s = "{";
    for (std::size_t i = 0; i < parts.size(); ++i)
        s += (i ? "," : "") + parts[i];
    return s + "}";
}

BooleanRelation split_vectors(const Orbit & o)
{
    const int k = o.arity();
    const int m = o.pattern().block_count();
    BooleanRelation out(k);
    const Tree & t = o.topology();
    auto blocks = o.pattern().blocks();
    std::vector<Tree::Node> side[2];
    for (BitVector bm = 0; bm < (1u << m); ++bm) {
        BitVector s = 0;
        for (int i = 0; i < k; ++i)
            if (bm >> o.pattern().block_of(i) & 1u)
                s |= 1u << i;
        if (bm == 0 || bm == (1u << m) - 1) {
            out.insert(s);
            continue;
        }
        side[0].clear();
        side[1].clear();
        for (int b = 0; b < m; ++b)
            side[bm >> b & 1u].push_back(o.node(blocks[b].front()));
        if (t.clan_separated(side[0], side[1]))
            out.insert(s);
    }
    return out;
}

BooleanRelation split_relation(const OrbitRelation & r)
{
    BooleanRelation out(r.arity());
    for (const auto & [key, o] : r) {
        BooleanRelation sv = split_vectors(o);
        for (BitVector v : sv.vectors())
            out.insert(v);
    }
    return out;
}

namespace {

// Reduced row echelon basis of a set of bit vectors, pivot = lowest set bit.
struct XorBasis {
    std::vector<BitVector> rows;

    bool add(BitVector v)
    {
        for (BitVector r : rows)
            if (v & (r & -r))
                v ^= r;
        if (! v)
            return false;
        BitVector piv = v & -v;
        for (BitVector & r : rows)
            if (r & piv)
                r ^= v;
        rows.push_back(v);
        return true;
    }
};

}  // namespace

std::optional<std::array<BitVector, 3>> affine_violation(const BooleanRelation & b)
{
    const auto & v = b.vectors();
    if (v.size() <= 2)
        return std::nullopt;
    BitVector b0 = v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (! b.contains(v[i] ^ v[j] ^ b0))
                return std::array<BitVector, 3>{v[i], v[j], b0};
    return std::nullopt;
}

bool is_affine(const BooleanRelation & b)
{
    if (b.empty())
        return true;
    XorBasis basis;
    for (BitVector v : b.vectors())
        basis.add(v ^ b.vectors()[0]);
    return basis.rows.size() < 32 && b.size() == (std::size_t{1} << basis.rows.size());
}

std::vector<Gf2Row> affine_hull(const BooleanRelation & b)
{
    if (b.empty())
        throw Error("affine hull of an empty relation");
    const int n = b.arity();
    BitVector b0 = b.vectors()[0];
    XorBasis basis;
    for (BitVector v : b.vectors())
        basis.add(v ^ b0);
    BitVector pivots = 0;
    for (BitVector r : basis.rows)
        pivots |= r & -r;
    std::vector<Gf2Row> out;
    for (int f = 0; f < n; ++f) {
        if (pivots >> f & 1u)
            continue;
        BitVector c = 1u << f;
        for (BitVector r : basis.rows)
            if (r >> f & 1u)
                c |= r & -r;
        Gf2Row row;
        for (int i = 0; i < n; ++i)
            if (c >> i & 1u)
                row.vars.push_back(i);
        row.rhs = std::popcount(c & b0) & 1;
        out.push_back(std::move(row));
    }
    return out;
}

Gf2System affine_hull_system(const BooleanRelation & b)
{
    Gf2System sys(b.arity());
    for (auto & row : affine_hull(b))
        sys.add_row(std::move(row));
    return sys;
}

void Gf2System::add_row(Gf2Row row)
{
    for (int v : row.vars)
        if (v < 0 || v >= n_)
            throw Error("GF(2) row variable out of range");
    rows_.push_back(std::move(row));
}

bool Gf2System::satisfied_by(const std::vector<std::uint8_t> & s) const
{
    for (const auto & row : rows_) {
        bool acc = false;
        for (int v : row.vars)
            acc ^= s.at(v) != 0;
        if (acc != row.rhs)
            return false;
    }
    return true;
}

std::string Gf2System::to_string() const
{
    std::ostringstream os;
    for (const auto & row : rows_) {
        if (row.vars.empty())
            os << "0";
        for (std::size_t i = 0; i < row.vars.size(); ++i) {
            if (i)
                os << " + ";
            int v = row.vars[i];
            if (names_.empty())
                os << "s" << v + 1;
            else
                os << names_[v];
        }
        os << " = " << row.rhs << "\n";
    }
    return os.str();
}

namespace {

// Parity union-find absorbs two-variable rows; the remaining rows are
// eliminated densely over class representatives.
struct Reduction {
    bool consistent = true;
    std::vector<int> root;
    std::vector<std::uint8_t> par;  // s_v = s_root ⊕ par
    std::vector<int> reps;          // ordered by smallest member
    std::vector<int> column;        // rep -> dense column or -1
    std::vector<int> column_rep;
    std::size_t words = 0;
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::uint8_t> rhs;
    std::vector<int> pivot;  // pivot column of each row

    int dimension() const { return static_cast<int>(reps.size() - rows.size()); }
};

struct ParityUf {
    std::vector<int> parent;
    std::vector<std::uint8_t> par;
    std::vector<int> size;

    explicit ParityUf(int n) : parent(n), par(n, 0), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }

    std::pair<int, std::uint8_t> find(int v)
    {
        std::uint8_t p = 0;
        int r = v;
        while (parent[r] != r) {
            p ^= par[r];
            r = parent[r];
        }
        // compress, keeping parities relative to the root
        std::uint8_t q = p;
        while (parent[v] != v) {
            int next = parent[v];
            std::uint8_t pv = par[v];
            parent[v] = r;
            par[v] = q;
            q ^= pv;
            v = next;
        }
        return {r, p};
    }

    bool unite(int u, int v, std::uint8_t rhs)
    {
        auto [ru, pu] = find(u);
        auto [rv, pv] = find(v);
        if (ru == rv)
            return (pu ^ pv) == rhs;
        if (size[ru] < size[rv])
            std::swap(ru, rv);
        parent[rv] = ru;
        par[rv] = pu ^ pv ^ rhs;
        size[ru] += size[rv];
        return true;
    }
};

Reduction reduce(const Gf2System & sys)
{
    const int n = sys.variable_count();
    Reduction red;
    ParityUf uf(n);
    std::vector<const Gf2Row *> dense_rows;
    std::vector<std::vector<int>> cleaned(sys.rows().size());
    std::vector<int> mark(n, 0);
    for (std::size_t i = 0; i < sys.rows().size(); ++i) {
        const Gf2Row & row = sys.rows()[i];
        auto & vars = cleaned[i];
        for (int v : row.vars)
            mark[v] ^= 1;
        for (int v : row.vars)
            if (mark[v]) {
                vars.push_back(v);
                mark[v] = 0;
            }
        if (vars.empty()) {
            if (row.rhs)
                red.consistent = false;
        }
        else if (vars.size() == 2) {
            if (! uf.unite(vars[0], vars[1], row.rhs))
                red.consistent = false;
        }
        else
            dense_rows.push_back(&row);
    }
    red.root.resize(n);
    red.par.resize(n);
    red.column.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        auto [r, p] = uf.find(v);
        red.root[v] = r;
        red.par[v] = p;
    }
    std::vector<std::uint8_t> seen(n, 0);
    for (int v = 0; v < n; ++v)
        if (! seen[red.root[v]]) {
            seen[red.root[v]] = 1;
            red.reps.push_back(red.root[v]);
        }
    if (! red.consistent)
        return red;

    for (const Gf2Row * row : dense_rows) {
        const auto & vars = cleaned[row - sys.rows().data()];
        for (int v : vars) {
            int r = red.root[v];
            if (red.column[r] < 0) {
                red.column[r] = static_cast<int>(red.column_rep.size());
                red.column_rep.push_back(r);
            }
        }
    }
    // keep dense columns in representative order for determinism
    {
        std::vector<int> order;
        for (int r : red.reps)
            if (red.column[r] >= 0)
                order.push_back(r);
        red.column_rep = order;
        for (std::size_t c = 0; c < order.size(); ++c)
            red.column[order[c]] = static_cast<int>(c);
    }
    const std::size_t d = red.column_rep.size();
    red.words = (d + 63) / 64;
    std::vector<std::vector<std::uint64_t>> m;
    std::vector<std::uint8_t> b;
    for (const Gf2Row * row : dense_rows) {
        std::vector<std::uint64_t> bits(red.words, 0);
        std::uint8_t rhs = row->rhs;
        for (int v : cleaned[row - sys.rows().data()]) {
            int c = red.column[red.root[v]];
            bits[c / 64] ^= std::uint64_t{1} << (c % 64);
            rhs ^= red.par[v];
        }
        m.push_back(std::move(bits));
        b.push_back(rhs);
    }

    std::size_t rank = 0;
    std::vector<int> pivots;
    for (std::size_t c = 0; c < d && rank < m.size(); ++c) {
        std::size_t w = c / 64;
        std::uint64_t bit = std::uint64_t{1} << (c % 64);
        std::size_t p = rank;
        while (p < m.size() && ! (m[p][w] & bit))
            ++p;
        if (p == m.size())
            continue;
        std::swap(m[p], m[rank]);
        std::swap(b[p], b[rank]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == rank || ! (m[r][w] & bit))
                continue;
            for (std::size_t k = w; k < red.words; ++k)
                m[r][k] ^= m[rank][k];
            b[r] ^= b[rank];
        }
        pivots.push_back(static_cast<int>(c));
        ++rank;
    }
    for (std::size_t r = rank; r < m.size(); ++r)
        if (b[r])
            red.consistent = false;
    m.resize(rank);
    b.resize(rank);
    red.rows = std::move(m);
    red.rhs = std::move(b);
    red.pivot = std::move(pivots);
    return red;
}

bool test_bit(const std::vector<std::uint64_t> & bits, int c)
{
    return bits[c / 64] >> (c % 64) & 1u;
}

std::vector<std::uint8_t> expand(const Reduction & red, const std::vector<std::uint8_t> & rep_value)
{
    std::vector<std::uint8_t> s(red.root.size());
    for (std::size_t v = 0; v < s.size(); ++v)
        s[v] = rep_value[red.root[v]] ^ red.par[v];
    return s;
}

bool is_constant(const std::vector<std::uint8_t> & s)
{
    return std::all_of(s.begin(), s.end(), [&](std::uint8_t x) { return x == s.front(); });
}

// Values of every representative for the given free-representative values.
std::vector<std::uint8_t> complete(const Reduction & red, std::vector<std::uint8_t> rep_value)
{
    std::vector<std::uint8_t> pivot_rep(red.root.size(), 0);
    for (int c : red.pivot)
        pivot_rep[red.column_rep[c]] = 1;
    for (std::size_t r = 0; r < red.rows.size(); ++r) {
        std::uint8_t acc = red.rhs[r];
        for (std::size_t c = 0; c < red.column_rep.size(); ++c) {
            int rep = red.column_rep[c];
            if (! pivot_rep[rep] && test_bit(red.rows[r], static_cast<int>(c)))
                acc ^= rep_value[rep];
        }
        rep_value[red.column_rep[red.pivot[r]]] = acc;
    }
    return rep_value;
}

}  // namespace

std::optional<int> solution_dimension(const Gf2System & sys)
{
    Reduction red = reduce(sys);
    if (! red.consistent)
        return std::nullopt;
    return red.dimension();
}

std::vector<BitVector> enumerate_solutions(const Gf2System & sys)
{
    const int n = sys.variable_count();
    if (n > 24)
        throw BoundError("solution enumeration limited to 24 variables");
    std::vector<BitVector> out;
    std::vector<std::uint8_t> s(n);
    for (BitVector v = 0; v < (BitVector{1} << n); ++v) {
        for (int i = 0; i < n; ++i)
            s[i] = v >> i & 1u;
        if (sys.satisfied_by(s))
            out.push_back(v);
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> nontrivial_solution(const Gf2System & sys, std::mt19937_64 * rng)
{
    Reduction red = reduce(sys);
    if (! red.consistent)
        throw Error("inconsistent split system");
    if (red.dimension() <= 0)
        return std::nullopt;

    const std::size_t n = red.root.size();
    std::vector<std::uint8_t> is_pivot(n, 0);
    for (int c : red.pivot)
        is_pivot[red.column_rep[c]] = 1;
    std::vector<int> free_reps;
    for (int r : red.reps)
        if (! is_pivot[r])
            free_reps.push_back(r);

    if (rng) {
        std::vector<std::uint8_t> value(n, 0);
        for (int f : free_reps)
            value[f] = (*rng)() & 1u;
        auto s = expand(red, complete(red, value));
        if (! is_constant(s))
            return s;
    }

    std::vector<std::uint8_t> base(n, 0);
    auto p = expand(red, complete(red, base));
    if (! is_constant(p))
        return p;
    for (int f : free_reps) {
        std::vector<std::uint8_t> value(n, 0);
        value[f] = 1;
        auto s = expand(red, complete(red, value));
        if (! is_constant(s))
            return s;
    }
    return std::nullopt;
}

}  // namespace phylo
