#include <phylocsp/error.hpp>
#include <phylocsp/tree.hpp>

#include <algorithm>
#include <cctype>

namespace phylo {

ParseError::ParseError(const std::string & what, int line, int column) :
    Error(line > 0 ? what + " at line " + std::to_string(line) + ", column " + std::to_string(column) : what),
    line_(line),
    column_(column)
{
}

bool is_valid_label(std::string_view label)
{
    if (label.empty())
        return false;
    return std::all_of(label.begin(), label.end(),
        [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

auto Tree::Builder::add_leaf(std::string label) -> Node
{
    if (! is_valid_label(label))
        throw Error("invalid leaf label '" + label + "'");
    recs_.push_back(Rec{{none, none}, std::move(label)});
    return static_cast<Node>(recs_.size() - 1);
}

auto Tree::Builder::add_internal(Node left, Node right) -> Node
{
    auto n = static_cast<Node>(recs_.size());
    if (left < 0 || right < 0 || left >= n || right >= n || left == right)
        throw Error("add_internal: bad child ids");
    recs_.push_back(Rec{{left, right}, {}});
    return n;
}

auto Tree::Builder::add_tree(const Tree & t) -> Node
{
    if (t.empty())
        throw Error("add_tree: empty tree");
    std::vector<Node> map(t.node_count(), none);
    // preorder ids: every child has a larger id than its parent
    for (Node v = static_cast<Node>(t.node_count()) - 1; v >= 0; --v) {
        if (t.is_leaf(v))
            map[v] = add_leaf(t.label(v));
        else
            map[v] = add_internal(map[t.child(v, 0)], map[t.child(v, 1)]);
    }
    return map[t.root()];
}

Tree Tree::Builder::build(Node root) const
{
    if (root < 0 || root >= static_cast<Node>(recs_.size()))
        throw Error("build: bad root id");

    Tree t;
    std::vector<Node> stack{root};
    std::vector<Node> new_id(recs_.size(), none);
    std::vector<Node> parent_of(recs_.size(), none);
    while (! stack.empty()) {
        Node old = stack.back();
        stack.pop_back();
        if (new_id[old] != none)
            throw Error("build: node reachable twice");
        auto id = static_cast<Node>(t.nodes_.size());
        new_id[old] = id;
        NodeRec rec;
        if (parent_of[old] != none) {
            rec.parent = new_id[parent_of[old]];
            rec.depth = t.nodes_[rec.parent].depth + 1;
            auto & pr = t.nodes_[rec.parent];
            pr.child[pr.child[0] == none ? 0 : 1] = id;
        }
        const Rec & r = recs_[old];
        if (r.child[0] == none) {
            rec.label = r.label;
            if (! t.by_label_.emplace(rec.label, id).second)
                throw Error("duplicate leaf label '" + rec.label + "'");
            t.leaves_.push_back(id);
        }
        else {
            for (int i = 1; i >= 0; --i) {
                parent_of[r.child[i]] = old;
                stack.push_back(r.child[i]);
            }
        }
        t.nodes_.push_back(std::move(rec));
    }
    t.root_ = 0;
    return t;
}

Tree Tree::leaf(std::string label)
{
    Builder b;
    return b.build(b.add_leaf(std::move(label)));
}

Tree Tree::join(const Tree & a, const Tree & b)
{
    for (Node l : a.leaves_)
        if (b.has_leaf(a.label(l)))
            throw Error("join: leaf label '" + a.label(l) + "' occurs in both trees");
    Builder builder;
    Node ra = builder.add_tree(a);
    Node rb = builder.add_tree(b);
    return builder.build(builder.add_internal(ra, rb));
}

namespace {

class NewickReader {
public:
    explicit NewickReader(std::string_view text) : text_(text) {}

    Tree read()
    {
        Tree::Builder b;
        skip_ws();
        Tree::Node root = subtree(b);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ';') {
            ++pos_;
            skip_ws();
        }
        if (pos_ != text_.size())
            fail("trailing characters");
        try {
            return b.build(root);
        }
        catch (const ParseError &) {
            throw;
        }
        catch (const Error & e) {
            fail(e.what());
        }
    }

private:
    // Iterative so that caterpillars with many thousands of leaves parse.
    Tree::Node subtree(Tree::Builder & b)
    {
        std::vector<Tree::Node> open;  // left child of each open '(' or none
        while (true) {
            skip_ws();
            if (pos_ >= text_.size())
                fail("unexpected end of input");
            if (text_[pos_] == '(') {
                ++pos_;
                open.push_back(Tree::none);
                continue;
            }
            Tree::Node node = leaf(b);
            while (true) {
                if (open.empty())
                    return node;
                if (open.back() == Tree::none) {
                    open.back() = node;
                    expect(',');
                    break;
                }
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',')
                    fail("non-binary node");
                expect(')');
                skip_ws();
                if (pos_ < text_.size() && is_label_char(text_[pos_]))
                    fail("internal node labels are not supported");
                node = b.add_internal(open.back(), node);
                open.pop_back();
            }
        }
    }

    Tree::Node leaf(Tree::Builder & b)
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_label_char(text_[pos_]))
            ++pos_;
        if (start == pos_)
            fail("expected leaf label or '('");
        std::string label(text_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ':')
            fail("edge lengths are not supported");
        return b.add_leaf(std::move(label));
    }

    static bool is_label_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void expect(char c)
    {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string & msg) const
    {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
        throw ParseError("newick: " + msg, line, col);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Tree Tree::parse_newick(std::string_view text)
{
    return NewickReader(text).read();
}

std::string Tree::to_newick() const
{
    if (empty())
        return ";";
    // ids are preorder, so children come after their parent
    std::vector<const std::string *> min_label(nodes_.size());
    for (Node v = static_cast<Node>(nodes_.size()) - 1; v >= 0; --v) {
        if (is_leaf(v)) {
            min_label[v] = &label(v);
            continue;
        }
        const std::string * a = min_label[child(v, 0)];
        const std::string * b = min_label[child(v, 1)];
        min_label[v] = *b < *a ? b : a;
    }
    std::string out;
    // positive entries are nodes to print, -1 a comma, -2 a closing parenthesis
    std::vector<Node> todo{root_};
    while (! todo.empty()) {
        Node v = todo.back();
        todo.pop_back();
        if (v == -1)
            out += ',';
        else if (v == -2)
            out += ')';
        else if (is_leaf(v))
            out += label(v);
        else {
            Node a = child(v, 0), b = child(v, 1);
            if (*min_label[b] < *min_label[a])
                std::swap(a, b);
            out += '(';
            todo.push_back(-2);
            todo.push_back(b);
            todo.push_back(-1);
            todo.push_back(a);
        }
    }
    return out + ";";
}

std::vector<std::string> Tree::leaf_labels() const
{
    std::vector<std::string> out;
    out.reserve(leaves_.size());
    for (Node l : leaves_)
        out.push_back(label(l));
    return out;
}

bool Tree::has_leaf(std::string_view label) const
{
    return by_label_.find(std::string(label)) != by_label_.end();
}

auto Tree::leaf_node(std::string_view label) const -> Node
{
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end())
        throw Error("unknown leaf label '" + std::string(label) + "'");
    return it->second;
}

auto Tree::lca(Node u, Node v) const -> Node
{
    while (nodes_[u].depth > nodes_[v].depth)
        u = nodes_[u].parent;
    while (nodes_[v].depth > nodes_[u].depth)
        v = nodes_[v].parent;
    while (u != v) {
        u = nodes_[u].parent;
        v = nodes_[v].parent;
    }
    return u;
}

auto Tree::yca(std::span<const Node> nodes) const -> Node
{
    if (nodes.empty())
        throw Error("yca of an empty set");
    Node y = nodes[0];
    for (std::size_t i = 1; i < nodes.size(); ++i)
        y = lca(y, nodes[i]);
    return y;
}

auto Tree::yca(const std::vector<std::string> & labels) const -> Node
{
    std::vector<Node> nodes;
    nodes.reserve(labels.size());
    for (const auto & l : labels)
        nodes.push_back(leaf_node(l));
    return yca(nodes);
}

bool Tree::below(Node u, Node v) const
{
    while (nodes_[u].depth > nodes_[v].depth)
        u = nodes_[u].parent;
    return u == v;
}

bool Tree::cone(Node x, Node y, Node z) const
{
    if (x == y || x == z)
        return false;
    Node yz = lca(y, z);
    return lca(x, yz) != yz;
}

bool Tree::cone(std::string_view x, std::string_view y, std::string_view z) const
{
    return cone(leaf_node(x), leaf_node(y), leaf_node(z));
}

bool Tree::clan_separated(std::span<const Node> a, std::span<const Node> b) const
{
    Node ya = yca(a), yb = yca(b);
    return ! below(ya, yb) && ! below(yb, ya);
}

bool Tree::clan_separated(const std::vector<std::string> & a, const std::vector<std::string> & b) const
{
    Node ya = yca(a), yb = yca(b);
    return ! below(ya, yb) && ! below(yb, ya);
}

std::vector<Tree::Node> Tree::leaves_below(Node v) const
{
    std::vector<Node> out, stack{v};
    while (! stack.empty()) {
        Node u = stack.back();
        stack.pop_back();
        if (is_leaf(u))
            out.push_back(u);
        else {
            stack.push_back(child(u, 1));
            stack.push_back(child(u, 0));
        }
    }
    return out;
}

Tree Tree::induced(std::span<const Node> leaves, const std::vector<std::string> & labels) const
{
    if (leaves.empty() || leaves.size() != labels.size())
        throw Error("induced: need one label per chosen leaf");
    std::vector<int> chosen(nodes_.size(), -1);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (! is_leaf(leaves[i]) || chosen[leaves[i]] != -1)
            throw Error("induced: leaves must be distinct leaf nodes");
        chosen[leaves[i]] = static_cast<int>(i);
    }

    // ids are preorder, so a reverse sweep visits children before parents
    Builder b;
    std::vector<Node> image(nodes_.size(), none);
    for (Node v = static_cast<Node>(nodes_.size()) - 1; v >= 0; --v) {
        if (is_leaf(v)) {
            if (chosen[v] >= 0)
                image[v] = b.add_leaf(labels[chosen[v]]);
            continue;
        }
        Node l = image[child(v, 0)], r = image[child(v, 1)];
        if (l != none && r != none)
            image[v] = b.add_internal(l, r);
        else
            image[v] = l != none ? l : r;
    }
    return b.build(image[root_]);
}

std::size_t tree_count(std::size_t n)
{
    std::size_t c = 1;
    for (std::size_t k = 3; k + 3 <= 2 * n; k += 2)
        c *= k;
    return c;
}

namespace {

struct Topology {
    std::vector<int> child0, child1, parent;
    int root = 0;
};

Tree to_tree(const Topology & t, const std::vector<std::string> & labels, int node_count)
{
    Tree::Builder b;
    std::vector<Tree::Node> ids(node_count, Tree::none);
    std::size_t n = labels.size();
    std::vector<int> stack{t.root}, order;
    while (! stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        if (static_cast<std::size_t>(v) >= n) {
            stack.push_back(t.child0[v]);
            stack.push_back(t.child1[v]);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (static_cast<std::size_t>(v) < n)
            ids[v] = b.add_leaf(labels[v]);
        else
            ids[v] = b.add_internal(ids[t.child0[v]], ids[t.child1[v]]);
    }
    return b.build(ids[t.root]);
}

// Inserts leaf k at every existing node position; each topology on n leaves
// arises exactly once from its restriction to the first n-1 leaves.
bool insert_rec(Topology & t, std::size_t k, const std::vector<std::string> & labels,
    const std::function<bool(const Tree &)> & fn)
{
    std::size_t n = labels.size();
    if (k == n)
        return fn(to_tree(t, labels, static_cast<int>(2 * n - 1)));
    int w = static_cast<int>(n + k - 1);
    std::vector<int> existing;
    for (std::size_t i = 0; i < k; ++i)
        existing.push_back(static_cast<int>(i));
    for (int i = static_cast<int>(n); i < w; ++i)
        existing.push_back(i);
    for (int v : existing) {
        int p = t.parent[v];
        t.child0[w] = v;
        t.child1[w] = static_cast<int>(k);
        t.parent[v] = w;
        t.parent[k] = w;
        t.parent[w] = p;
        int old_root = t.root;
        if (p == -1)
            t.root = w;
        else if (t.child0[p] == v)
            t.child0[p] = w;
        else
            t.child1[p] = w;

        bool go_on = insert_rec(t, k + 1, labels, fn);

        if (p == -1)
            t.root = old_root;
        else if (t.child0[p] == w)
            t.child0[p] = v;
        else
            t.child1[p] = v;
        t.parent[v] = p;
        t.parent[k] = -1;
        t.parent[w] = -1;
        if (! go_on)
            return false;
    }
    return true;
}

}  // namespace

void for_each_tree(const std::vector<std::string> & labels, const std::function<bool(const Tree &)> & fn,
    std::size_t max_leaves)
{
    if (labels.empty())
        throw Error("tree enumeration needs at least one label");
    if (labels.size() > max_leaves)
        throw BoundError("tree enumeration bound exceeded: " + std::to_string(labels.size()) + " > "
            + std::to_string(max_leaves) + " leaves");
    std::size_t n = labels.size();
    Topology t;
    t.child0.assign(2 * n, -1);
    t.child1.assign(2 * n, -1);
    t.parent.assign(2 * n, -1);
    t.root = 0;
    insert_rec(t, 1, labels, fn);
}

std::vector<Tree> enumerate_trees(const std::vector<std::string> & labels, std::size_t max_leaves)
{
    std::vector<Tree> out;
    for_each_tree(labels, [&](const Tree & t) {
        out.push_back(t);
        return true;
    }, max_leaves);
    return out;
}

Tree random_tree(const std::vector<std::string> & labels, std::mt19937_64 & rng)
{
    if (labels.empty())
        throw Error("random tree needs at least one leaf");
    Tree::Builder b;
    std::vector<Tree::Node> pool;
    for (const auto & l : labels)
        pool.push_back(b.add_leaf(l));
    while (pool.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::size_t i = pick(rng);
        std::swap(pool[i], pool.back());
        Tree::Node x = pool.back();
        pool.pop_back();
        std::uniform_int_distribution<std::size_t> pick2(0, pool.size() - 1);
        std::size_t j = pick2(rng);
        pool[j] = rng() & 1u ? b.add_internal(x, pool[j]) : b.add_internal(pool[j], x);
    }
    return b.build(pool[0]);
}

}  // namespace phylo
