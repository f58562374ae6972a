#include "bell/dd.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bell/manifest.hpp"

namespace bell {

namespace {

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, std::size_t k) { b[k >> 6] |= std::uint64_t(1) << (k & 63); }

int popcount_bits(const Bits& a) {
    int c = 0;
    for (std::uint64_t w : a) c += std::popcount(w);
    return c;
}

Bits and_bits(const Bits& a, const Bits& b) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
    return out;
}

bool subset_bits(const Bits& a, const Bits& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    Rat acc(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) acc += a[i] * b[i];
    return acc;
}

struct Rref {
    std::vector<std::vector<Rat>> rows;  // reduced, one pivot per row
    std::vector<int> pivots;             // pivot column per row, increasing
};

Rref rref(std::vector<std::vector<Rat>> m) {
    Rref out;
    if (m.empty()) return out;
    std::size_t r = 0;
    int d = static_cast<int>(m[0].size());
    for (int col = 0; col < d && r < m.size(); ++col) {
        std::size_t p = r;
        while (p < m.size() && m[p][col] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[r], m[p]);
        Rat inv = m[r][col];
        for (int c = col; c < d; ++c) m[r][c] /= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][col] == 0) continue;
            Rat f = m[i][col];
            for (int c = col; c < d; ++c) m[i][c] -= f * m[r][c];
        }
        out.pivots.push_back(col);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

bool rank_at_least(const std::vector<std::vector<Rat>>& all_rows, const std::vector<int>& idx, int d, int target) {
    if (target <= 0) return true;
    if (static_cast<int>(idx.size()) < target) return false;
    std::vector<std::vector<Rat>> work;
    work.reserve(idx.size());
    for (int i : idx) work.push_back(all_rows[i]);
    int rank = 0;
    for (int col = 0; col < d && rank < target; ++col) {
        std::size_t p = rank;
        while (p < work.size() && work[p][col] == 0) ++p;
        if (p == work.size()) continue;
        std::swap(work[rank], work[p]);
        for (std::size_t i = rank + 1; i < work.size(); ++i) {
            if (work[i][col] == 0) continue;
            Rat f = work[i][col] / work[rank][col];
            for (int c = col; c < d; ++c) work[i][c] -= f * work[rank][c];
        }
        ++rank;
    }
    return rank >= target;
}

struct Ray {
    std::vector<Rat> v;
    Bits tight;
};

std::string join_rationals(const std::vector<Rat>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_rational(v[i]);
    }
    return out;
}

std::vector<Rat> split_rationals(const std::string& line, const char* what) {
    std::vector<Rat> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        std::string field = comma == std::string::npos ? line.substr(start) : line.substr(start, comma - start);
        try {
            out.push_back(parse_rational(field));
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(what) + ": " + e.what());
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Double description on the pointed cone {y : row . y <= 0 for all rows}.
// Rows are primitive-integerized, lexicographically sorted, deduplicated; the
// first maximal independent subset seeds the simplicial start cone and the
// rest are inserted in order.
class DdRunner {
  public:
    DdRunner(std::vector<std::vector<Rat>> input_rows, int dim, const DdOptions& opts) : D_(dim), opts_(opts) {
        for (auto& r : input_rows) r = primitive_integer_vector(std::move(r));
        std::sort(input_rows.begin(), input_rows.end());
        input_rows.erase(std::unique(input_rows.begin(), input_rows.end()), input_rows.end());
        rows_ = std::move(input_rows);
        std::string blob = std::to_string(D_);
        for (const auto& r : rows_) {
            blob += '\n';
            blob += join_rationals(r);
        }
        hash_ = fnv1a64_hex(blob);
        words_ = (rows_.size() + 63) / 64;
        if (words_ == 0) words_ = 1;
    }

    std::vector<std::vector<Rat>> run() {
        if (!(opts_.resume && load_checkpoint())) init();
        while (processed_ < rows_.size()) {
            step();
            maybe_checkpoint(false);
        }
        maybe_checkpoint(true);
        std::vector<std::vector<Rat>> out;
        out.reserve(rays_.size());
        for (auto& r : rays_) out.push_back(std::move(r.v));
        return out;
    }

  private:
    int D_;
    DdOptions opts_;
    std::vector<std::vector<Rat>> rows_;
    std::string hash_;
    std::size_t words_ = 1;
    std::vector<Ray> rays_;
    std::size_t processed_ = 0;
    long new_since_checkpoint_ = 0;

    void log(const std::string& msg) {
        if (opts_.log) opts_.log(msg);
    }

    void init() {
        reorder_basis_first();
        // start cone rays: columns of -M^{-1}, tight on all basis rows but one
        std::vector<std::vector<Rat>> m(D_, std::vector<Rat>(2 * D_, Rat(0)));
        for (int i = 0; i < D_; ++i) {
            for (int j = 0; j < D_; ++j) m[i][j] = rows_[i][j];
            m[i][D_ + i] = Rat(1);
        }
        for (int col = 0; col < D_; ++col) {
            int p = col;
            while (p < D_ && m[p][col] == 0) ++p;
            if (p == D_) throw std::logic_error("dd: singular start basis");
            std::swap(m[col], m[p]);
            Rat inv = m[col][col];
            for (int c = 0; c < 2 * D_; ++c) m[col][c] /= inv;
            for (int i = 0; i < D_; ++i) {
                if (i == col || m[i][col] == 0) continue;
                Rat f = m[i][col];
                for (int c = 0; c < 2 * D_; ++c) m[i][c] -= f * m[col][c];
            }
        }
        rays_.clear();
        rays_.reserve(D_);
        for (int k = 0; k < D_; ++k) {
            Ray r;
            r.v.resize(D_);
            for (int i = 0; i < D_; ++i) r.v[i] = -m[i][D_ + k];
            r.v = primitive_integer_vector(std::move(r.v));
            r.tight.assign(words_, 0);
            for (int j = 0; j < D_; ++j)
                if (j != k) set_bit(r.tight, j);
            rays_.push_back(std::move(r));
        }
        processed_ = static_cast<std::size_t>(D_);
        log("dd: start cone with " + std::to_string(D_) + " rays, " + std::to_string(rows_.size()) + " rows");
    }

    void step() {
        const std::vector<Rat>& a = rows_[processed_];
        std::vector<Rat> val(rays_.size());
        std::vector<std::size_t> pos, neg, zero;
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            val[i] = dot(a, rays_[i].v);
            if (val[i] > 0) pos.push_back(i);
            else if (val[i] < 0) neg.push_back(i);
            else zero.push_back(i);
        }
        if (pos.empty()) {
            for (std::size_t i : zero) set_bit(rays_[i].tight, processed_);
            ++processed_;
            return;
        }
        std::vector<Ray> created;
        for (std::size_t u : pos) {
            for (std::size_t v : neg) {
                if (!adjacent(u, v)) continue;
                Ray nr;
                nr.v.resize(D_);
                for (int c = 0; c < D_; ++c) nr.v[c] = val[u] * rays_[v].v[c] - val[v] * rays_[u].v[c];
                nr.v = primitive_integer_vector(std::move(nr.v));
                nr.tight.assign(words_, 0);
                for (std::size_t k = 0; k <= processed_; ++k)
                    if (dot(rows_[k], nr.v) == 0) set_bit(nr.tight, k);
                created.push_back(std::move(nr));
            }
        }
        std::vector<Ray> next;
        next.reserve(neg.size() + zero.size() + created.size());
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            if (val[i] > 0) continue;
            if (val[i] == 0) set_bit(rays_[i].tight, processed_);
            next.push_back(std::move(rays_[i]));
        }
        for (auto& r : created) next.push_back(std::move(r));
        rays_ = std::move(next);
        new_since_checkpoint_ += static_cast<long>(created.size());
        ++processed_;
        log("dd: row " + std::to_string(processed_) + "/" + std::to_string(rows_.size()) + " rays=" +
            std::to_string(rays_.size()) + " new=" + std::to_string(created.size()));
    }

    bool adjacent(std::size_t u, std::size_t v) {
        Bits common = and_bits(rays_[u].tight, rays_[v].tight);
        if (popcount_bits(common) < D_ - 2) return false;
        for (std::size_t w = 0; w < rays_.size(); ++w) {
            if (w == u || w == v) continue;
            if (subset_bits(common, rays_[w].tight)) return false;
        }
        std::vector<int> idx;
        for (std::size_t k = 0; k < processed_; ++k)
            if ((common[k >> 6] >> (k & 63)) & 1) idx.push_back(static_cast<int>(k));
        return rank_at_least(rows_, idx, D_, D_ - 2);
    }

    void maybe_checkpoint(bool force) {
        if (opts_.checkpoint_path.empty()) return;
        if (!force && new_since_checkpoint_ < opts_.checkpoint_every) return;
        std::string tmp = opts_.checkpoint_path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw std::runtime_error("dd: cannot write checkpoint " + tmp);
            out << "dd-checkpoint v1\n";
            out << "hash=" << hash_ << "\n";
            out << "D=" << D_ << " processed=" << processed_ << " rays=" << rays_.size() << "\n";
            for (const auto& r : rays_) out << join_rationals(r.v) << "\n";
            if (!out) throw std::runtime_error("dd: checkpoint write failed");
        }
        if (std::rename(tmp.c_str(), opts_.checkpoint_path.c_str()) != 0)
            throw std::runtime_error("dd: cannot move checkpoint into place");
        new_since_checkpoint_ = 0;
        log("dd: checkpoint at " + std::to_string(processed_) + " rows, " + std::to_string(rays_.size()) + " rays");
    }

    bool load_checkpoint() {
        std::ifstream in(opts_.checkpoint_path, std::ios::binary);
        if (!in) return false;
        std::string line;
        if (!std::getline(in, line) || line != "dd-checkpoint v1")
            throw std::runtime_error("dd: unrecognized checkpoint format");
        if (!std::getline(in, line) || line.rfind("hash=", 0) != 0)
            throw std::runtime_error("dd: checkpoint missing hash");
        if (line.substr(5) != hash_)
            throw std::runtime_error("dd: checkpoint does not match this system (stale hash)");
        int d = 0;
        std::size_t processed = 0, count = 0;
        if (!std::getline(in, line) ||
            std::sscanf(line.c_str(), "D=%d processed=%zu rays=%zu", &d, &processed, &count) != 3 || d != D_ ||
            processed < static_cast<std::size_t>(D_) || processed > rows_.size())
            throw std::runtime_error("dd: malformed checkpoint header");
        // The checkpointed run used the same deterministic row order, so the
        // basis reorder must be replayed before indices line up.
        reorder_basis_first();
        rays_.clear();
        rays_.reserve(count);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Ray r;
            r.v = split_rationals(line, "dd checkpoint");
            if (r.v.size() != static_cast<std::size_t>(D_)) throw std::runtime_error("dd: checkpoint ray has wrong arity");
            r.tight.assign(words_, 0);
            for (std::size_t k = 0; k < processed; ++k)
                if (dot(rows_[k], r.v) == 0) set_bit(r.tight, k);
            rays_.push_back(std::move(r));
        }
        if (rays_.size() != count) throw std::runtime_error("dd: checkpoint ray count mismatch");
        processed_ = processed;
        log("dd: resumed at row " + std::to_string(processed_) + " with " + std::to_string(rays_.size()) + " rays");
        return true;
    }

    // Moves the greedy maximal independent row subset (in sorted order) to the
    // front; both fresh starts and resumes replay this deterministically.
    void reorder_basis_first() {
        std::vector<std::size_t> basis;
        std::vector<std::vector<Rat>> reduced;
        std::vector<int> pivot_col;
        for (std::size_t i = 0; i < rows_.size() && static_cast<int>(basis.size()) < D_; ++i) {
            std::vector<Rat> w = rows_[i];
            for (std::size_t k = 0; k < reduced.size(); ++k) {
                const Rat& f = w[pivot_col[k]];
                if (f == 0) continue;
                Rat factor = f / reduced[k][pivot_col[k]];
                for (int c = 0; c < D_; ++c) w[c] -= factor * reduced[k][c];
            }
            int pc = -1;
            for (int c = 0; c < D_; ++c)
                if (w[c] != 0) {
                    pc = c;
                    break;
                }
            if (pc < 0) continue;
            basis.push_back(i);
            reduced.push_back(std::move(w));
            pivot_col.push_back(pc);
        }
        if (static_cast<int>(basis.size()) < D_)
            throw std::invalid_argument("dd: input cone is not pointed (row rank below dimension)");
        std::vector<std::vector<Rat>> reordered;
        reordered.reserve(rows_.size());
        std::vector<bool> is_basis(rows_.size(), false);
        for (std::size_t b : basis) is_basis[b] = true;
        for (std::size_t b : basis) reordered.push_back(rows_[b]);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (!is_basis[i]) reordered.push_back(rows_[i]);
        rows_ = std::move(reordered);
    }
};

}  // namespace

FacetResult facet_enumerate(const std::vector<std::vector<Rat>>& points, const DdOptions& opts) {
    if (points.empty()) throw std::invalid_argument("facet_enumerate: no points");
    std::size_t d = points[0].size();
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("facet_enumerate: inconsistent point dimensions");
    if (d == 0) throw std::invalid_argument("facet_enumerate: zero-dimensional points");
    std::vector<std::vector<Rat>> pts = points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::vector<Rat>& p0 = pts[0];
    std::vector<std::vector<Rat>> diffs;
    diffs.reserve(pts.size());
    for (const auto& p : pts) {
        std::vector<Rat> q(d);
        for (std::size_t c = 0; c < d; ++c) q[c] = p[c] - p0[c];
        diffs.push_back(std::move(q));
    }
    Rref hull = rref(diffs);
    int k = static_cast<int>(hull.pivots.size());
    FacetResult res;
    res.dim = k;
    // affine-hull equalities from the kernel of the difference matrix
    std::vector<bool> is_pivot(d, false);
    for (int c : hull.pivots) is_pivot[c] = true;
    for (std::size_t f = 0; f < d; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rat> e(d + 1, Rat(0));
        e[f] = Rat(1);
        for (int a = 0; a < k; ++a) e[hull.pivots[a]] = -hull.rows[a][f];
        Rat b(0);
        for (std::size_t c = 0; c < d; ++c) b += e[c] * p0[c];
        e[d] = b;
        e = primitive_integer_vector(std::move(e));
        LinearInequality eq;
        eq.a.assign(e.begin(), e.end() - 1);
        eq.b = e.back();
        res.equalities.push_back(std::move(eq));
    }
    std::sort(res.equalities.begin(), res.equalities.end(),
              [](const LinearInequality& x, const LinearInequality& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    if (k == 0) return res;
    // polar-cone rows (t_i, 1) in the hull coordinates
    std::vector<std::vector<Rat>> rows;
    rows.reserve(pts.size());
    for (const auto& q : diffs) {
        std::vector<Rat> row(k + 1);
        for (int a = 0; a < k; ++a) row[a] = q[hull.pivots[a]];
        row[k] = Rat(1);
        rows.push_back(std::move(row));
    }
    DdRunner dd(std::move(rows), k + 1, opts);
    std::vector<std::vector<Rat>> rays = dd.run();
    for (const auto& ray : rays) {
        bool nonzero = false;
        for (int a = 0; a < k; ++a)
            if (ray[a] != 0) nonzero = true;
        if (!nonzero) continue;
        std::vector<Rat> h(d + 1, Rat(0));
        for (int a = 0; a < k; ++a) h[hull.pivots[a]] = ray[a];
        Rat bound = -ray[k];
        for (std::size_t c = 0; c < d; ++c) bound += h[c] * p0[c];
        h[d] = bound;
        h = primitive_integer_vector(std::move(h));
        LinearInequality facet;
        facet.a.assign(h.begin(), h.end() - 1);
        facet.b = h.back();
        res.facets.push_back(std::move(facet));
    }
    std::sort(res.facets.begin(), res.facets.end(),
              [](const LinearInequality& x, const LinearInequality& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return res;
}

VertexResult vertex_enumerate(const std::vector<LinearInequality>& system, const DdOptions& opts) {
    if (system.empty()) throw std::invalid_argument("vertex_enumerate: empty system");
    std::size_t d = system[0].a.size();
    for (const auto& ineq : system)
        if (ineq.a.size() != d) throw std::invalid_argument("vertex_enumerate: inconsistent dimensions");
    std::vector<std::vector<Rat>> rows;
    rows.reserve(system.size() + 1);
    for (const auto& ineq : system) {
        std::vector<Rat> row(d + 1);
        for (std::size_t c = 0; c < d; ++c) row[c] = ineq.a[c];
        row[d] = -ineq.b;
        rows.push_back(std::move(row));
    }
    std::vector<Rat> hom(d + 1, Rat(0));
    hom[d] = Rat(-1);
    rows.push_back(std::move(hom));
    DdRunner dd(std::move(rows), static_cast<int>(d) + 1, opts);
    std::vector<std::vector<Rat>> rays = dd.run();
    VertexResult res;
    for (const auto& ray : rays) {
        const Rat& t = ray[d];
        if (t > 0) {
            std::vector<Rat> v(d);
            for (std::size_t c = 0; c < d; ++c) v[c] = ray[c] / t;
            res.vertices.push_back(std::move(v));
        } else {
            std::vector<Rat> r(ray.begin(), ray.end() - 1);
            res.rays.push_back(primitive_integer_vector(std::move(r)));
        }
    }
    std::sort(res.vertices.begin(), res.vertices.end());
    std::sort(res.rays.begin(), res.rays.end());
    return res;
}

}  // namespace bell
