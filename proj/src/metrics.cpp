#include "rustico/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rustico/errors.hpp"
#include "parallel.hpp"

namespace rustico {

namespace {

constexpr double kDtInf = 1e20;

// 1-D squared distance transform, lower envelope of parabolas
void dt_1d(const double* f, double* d, int n, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kDtInf;
    z[1] = kDtInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + static_cast<double>(q) * q) -
                    (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kDtInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q)
            ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

void require_same_size(const BinaryMask& a, const BinaryMask& b, const char* where) {
    if (!a.same_size(b))
        throw EvalError(std::string(where) + ": mask dimensions differ");
}

Prf prf_from_distances(const BinaryMask& det, const BinaryMask& gt,
                       const std::vector<double>& sq_to_gt, double d_star,
                       DistanceMetric metric, const std::vector<int>* cheb_to_gt) {
    const std::size_t n_det = det.count();
    const std::size_t n_gt = gt.count();
    if (n_det == 0 && n_gt == 0)
        return {1.0, 1.0, 1.0};
    if (n_det == 0 || n_gt == 0)
        return {0.0, 0.0, 0.0};

    std::size_t tp_det = 0;
    if (metric == DistanceMetric::euclidean) {
        const double lim = d_star * d_star;
        for (std::size_t i = 0; i < det.size(); ++i)
            if (det.bits[i] && sq_to_gt[i] <= lim)
                ++tp_det;
    } else {
        for (std::size_t i = 0; i < det.size(); ++i)
            if (det.bits[i] && (*cheb_to_gt)[i] <= d_star)
                ++tp_det;
    }

    std::size_t tp_gt = 0;
    if (metric == DistanceMetric::euclidean) {
        const std::vector<double> sq_to_det = squared_distance_transform(det);
        const double lim = d_star * d_star;
        for (std::size_t i = 0; i < gt.size(); ++i)
            if (gt.bits[i] && sq_to_det[i] <= lim)
                ++tp_gt;
    } else {
        const std::vector<int> cheb_to_det = chebyshev_distance_transform(det);
        for (std::size_t i = 0; i < gt.size(); ++i)
            if (gt.bits[i] && cheb_to_det[i] <= d_star)
                ++tp_gt;
    }

    Prf out;
    out.precision = static_cast<double>(tp_det) / static_cast<double>(n_det);
    out.recall = static_cast<double>(tp_gt) / static_cast<double>(n_gt);
    out.f = (out.precision + out.recall) > 0.0
                ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                : 0.0;
    return out;
}

} // namespace

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits)
        n += b;
    return n;
}

BinaryMask threshold_map(const GrayImage& resp, double t) {
    if (!(t > 0.0 && t <= 1.0))
        throw std::invalid_argument("threshold_map: t must be in (0, 1]");
    BinaryMask out(resp.width, resp.height);
    for (std::size_t i = 0; i < resp.size(); ++i)
        out.bits[i] = resp.data[i] >= t ? 1 : 0;
    return out;
}

std::vector<double> threshold_grid() {
    std::vector<double> grid(100);
    for (int k = 1; k <= 100; ++k)
        grid[k - 1] = k / 100.0;
    return grid;
}

std::vector<double> squared_distance_transform(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<double> dist(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        dist[i] = mask.bits[i] ? 0.0 : kDtInf;

    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    // columns
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y)
            f[y] = dist[static_cast<std::size_t>(y) * w + x];
        dt_1d(f.data(), d.data(), h, v.data(), z.data());
        for (int y = 0; y < h; ++y)
            dist[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    // rows
    for (int y = 0; y < h; ++y) {
        double* row = dist.data() + static_cast<std::size_t>(y) * w;
        std::copy(row, row + w, f.begin());
        dt_1d(f.data(), d.data(), w, v.data(), z.data());
        std::copy(d.begin(), d.begin() + w, row);
    }
    return dist;
}

std::vector<int> chebyshev_distance_transform(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    const int inf = w + h + 2;
    std::vector<int> dist(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        dist[i] = mask.bits[i] ? 0 : inf;

    auto at = [&](int x, int y) -> int& { return dist[static_cast<std::size_t>(y) * w + x]; };
    // forward raster pass
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int best = at(x, y);
            if (x > 0) best = std::min(best, at(x - 1, y) + 1);
            if (y > 0) {
                best = std::min(best, at(x, y - 1) + 1);
                if (x > 0) best = std::min(best, at(x - 1, y - 1) + 1);
                if (x + 1 < w) best = std::min(best, at(x + 1, y - 1) + 1);
            }
            at(x, y) = best;
        }
    // backward pass
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            int best = at(x, y);
            if (x + 1 < w) best = std::min(best, at(x + 1, y) + 1);
            if (y + 1 < h) {
                best = std::min(best, at(x, y + 1) + 1);
                if (x + 1 < w) best = std::min(best, at(x + 1, y + 1) + 1);
                if (x > 0) best = std::min(best, at(x - 1, y + 1) + 1);
            }
            at(x, y) = best;
        }
    return dist;
}

Prf centerline_prf(const BinaryMask& det, const BinaryMask& gt, double d_star,
                   DistanceMetric metric) {
    require_same_size(det, gt, "centerline_prf");
    if (d_star < 0.0)
        throw std::invalid_argument("centerline_prf: d_star must be >= 0");
    if (metric == DistanceMetric::euclidean) {
        const std::vector<double> sq_to_gt = squared_distance_transform(gt);
        return prf_from_distances(det, gt, sq_to_gt, d_star, metric, nullptr);
    }
    const std::vector<int> cheb = chebyshev_distance_transform(gt);
    return prf_from_distances(det, gt, {}, d_star, metric, &cheb);
}

SweepResult sweep_thresholds(const std::vector<const GrayImage*>& responses,
                             const std::vector<const BinaryMask*>& gts, double d_star,
                             DistanceMetric metric) {
    if (responses.empty() || responses.size() != gts.size())
        throw std::invalid_argument("sweep_thresholds: need matched nonempty image sets");
    const std::vector<double> grid = threshold_grid();
    const std::size_t n_img = responses.size();

    // per image, per grid point
    std::vector<std::vector<Prf>> scores(n_img, std::vector<Prf>(grid.size()));
    detail::parallel_for(n_img, 0, [&](std::size_t i) {
        const GrayImage& resp = *responses[i];
        const BinaryMask& gt = *gts[i];
        if (resp.width != gt.width || resp.height != gt.height)
            throw EvalError("sweep_thresholds: response/ground-truth size mismatch");
        std::vector<double> sq_to_gt;
        std::vector<int> cheb_to_gt;
        if (metric == DistanceMetric::euclidean)
            sq_to_gt = squared_distance_transform(gt);
        else
            cheb_to_gt = chebyshev_distance_transform(gt);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const BinaryMask det = threshold_map(resp, grid[k]);
            scores[i][k] = prf_from_distances(det, gt, sq_to_gt, d_star, metric,
                                              metric == DistanceMetric::chebyshev ? &cheb_to_gt
                                                                                  : nullptr);
        }
    });

    SweepResult res;
    std::size_t best_k = 0;
    double best_f = -1.0;
    res.curve.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double sp = 0.0, sr = 0.0, sf = 0.0;
        for (std::size_t i = 0; i < n_img; ++i) {
            sp += scores[i][k].precision;
            sr += scores[i][k].recall;
            sf += scores[i][k].f;
        }
        sp /= static_cast<double>(n_img);
        sr /= static_cast<double>(n_img);
        sf /= static_cast<double>(n_img);
        res.curve.push_back({grid[k], sp, sr, sf});
        if (sf > best_f) {
            best_f = sf;
            best_k = k;
        }
    }
    res.t_star = grid[best_k];
    res.avg_precision = res.curve[best_k][1];
    res.avg_recall = res.curve[best_k][2];
    res.avg_f = res.curve[best_k][3];
    res.per_image.resize(n_img);
    for (std::size_t i = 0; i < n_img; ++i)
        res.per_image[i] = scores[i][best_k];
    return res;
}

double mcc(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* fov) {
    require_same_size(pred, gt, "mcc");
    if (fov)
        require_same_size(*fov, gt, "mcc(fov)");
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (fov && !fov->bits[i])
            continue;
        const bool p = pred.bits[i] != 0;
        const bool g = gt.bits[i] != 0;
        if (p && g) ++tp;
        else if (p && !g) ++fp;
        else if (!p && g) ++fn;
        else ++tn;
    }
    const double d1 = tp + fp, d2 = tp + fn, d3 = tn + fp, d4 = tn + fn;
    if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0)
        return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
}

int count_components(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<int> stack;
    int components = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[idx] || seen[idx])
                continue;
            ++components;
            seen[idx] = 1;
            stack.push_back(static_cast<int>(idx));
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cy = cur / w;
                const int cx = cur % w;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0)
                            continue;
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[ni] && !seen[ni]) {
                            seen[ni] = 1;
                            stack.push_back(static_cast<int>(ni));
                        }
                    }
            }
        }
    }
    return components;
}

BinaryMask dilate_disk(const BinaryMask& mask, double radius) {
    if (radius < 0.0)
        throw std::invalid_argument("dilate_disk: negative radius");
    BinaryMask out(mask.width, mask.height);
    const std::vector<double> sq = squared_distance_transform(mask);
    const double lim = radius * radius;
    for (std::size_t i = 0; i < mask.size(); ++i)
        out.bits[i] = sq[i] <= lim ? 1 : 0;
    return out;
}

namespace {

// Zhang-Suen deletability for one sub-iteration
inline bool zs_deletable(const BinaryMask& sk, int x, int y, int step) {
    const int w = sk.width;
    const int h = sk.height;
    auto px = [&](int xx, int yy) -> int {
        if (xx < 0 || yy < 0 || xx >= w || yy >= h)
            return 0;
        return sk.bits[static_cast<std::size_t>(yy) * w + xx] ? 1 : 0;
    };
    const int p2 = px(x, y - 1), p3 = px(x + 1, y - 1), p4 = px(x + 1, y);
    const int p5 = px(x + 1, y + 1), p6 = px(x, y + 1), p7 = px(x - 1, y + 1);
    const int p8 = px(x - 1, y), p9 = px(x - 1, y - 1);
    const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
    if (b < 2 || b > 6)
        return false;
    int a = 0;
    const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
    for (int i = 0; i < 8; ++i)
        if (seq[i] == 0 && seq[i + 1] == 1)
            ++a;
    if (a != 1)
        return false;
    if (step == 0)
        return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
    return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

} // namespace

BinaryMask skeletonize(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    BinaryMask sk = mask;

    // a pixel's verdict can only flip when its 8-neighborhood changed, so each
    // sub-iteration revisits just the dirty set instead of rescanning the image;
    // the fixed point matches the full-scan algorithm
    std::vector<std::size_t> dirty[2];
    dirty[0].reserve(mask.count());
    for (std::size_t i = 0; i < sk.size(); ++i)
        if (sk.bits[i])
            dirty[0].push_back(i);
    dirty[1] = dirty[0];

    std::vector<std::size_t> to_delete;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int step = 0; step < 2; ++step) {
            std::sort(dirty[step].begin(), dirty[step].end());
            dirty[step].erase(std::unique(dirty[step].begin(), dirty[step].end()),
                              dirty[step].end());
            to_delete.clear();
            for (std::size_t idx : dirty[step]) {
                if (!sk.bits[idx])
                    continue;
                const int x = static_cast<int>(idx % w);
                const int y = static_cast<int>(idx / w);
                if (zs_deletable(sk, x, y, step))
                    to_delete.push_back(idx);
            }
            dirty[step].clear();
            if (to_delete.empty())
                continue;
            changed = true;
            for (std::size_t idx : to_delete)
                sk.bits[idx] = 0;
            for (std::size_t idx : to_delete) {
                const int x = static_cast<int>(idx % w);
                const int y = static_cast<int>(idx / w);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (sk.bits[ni]) {
                            dirty[0].push_back(ni);
                            dirty[1].push_back(ni);
                        }
                    }
            }
        }
    }
    return sk;
}

namespace {

// ground-truth side of the CAL computation, reusable across a threshold sweep
struct CalGtContext {
    const BinaryMask* gt = nullptr;
    std::size_t count = 0;
    int components = 0;
    BinaryMask dil_a;
    BinaryMask dil_b;
    BinaryMask skeleton;
};

CalGtContext make_cal_context(const BinaryMask& gt, double alpha, double beta) {
    CalGtContext ctx;
    ctx.gt = &gt;
    ctx.count = gt.count();
    if (ctx.count == 0)
        throw EvalError("cal: empty ground truth");
    ctx.components = count_components(gt);
    ctx.dil_a = dilate_disk(gt, alpha);
    ctx.dil_b = beta == alpha ? ctx.dil_a : dilate_disk(gt, beta);
    ctx.skeleton = skeletonize(gt);
    return ctx;
}

CalResult cal_against(const BinaryMask& pred, const CalGtContext& ctx, double alpha,
                      double beta) {
    const BinaryMask& gt = *ctx.gt;
    require_same_size(pred, gt, "cal");
    const std::size_t n_pred = pred.count();

    CalResult r;
    const int cc_pred = count_components(pred);
    r.c = 1.0 - std::min(1.0, std::abs(ctx.components - cc_pred) / static_cast<double>(ctx.count));

    if (n_pred == 0) {
        r.a = 0.0;
        r.l = 0.0;
        r.cal = 0.0;
        return r;
    }

    const BinaryMask dil_pred_a = dilate_disk(pred, alpha);
    BinaryMask dil_pred_b_storage;
    const BinaryMask* dil_pred_b = &dil_pred_a;
    if (beta != alpha) {
        dil_pred_b_storage = dilate_disk(pred, beta);
        dil_pred_b = &dil_pred_b_storage;
    }

    std::size_t a_num = 0, a_den = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.bits[i] != 0;
        const bool g = gt.bits[i] != 0;
        if ((dil_pred_a.bits[i] && g) || (p && ctx.dil_a.bits[i]))
            ++a_num;
        if (p || g)
            ++a_den;
    }
    r.a = static_cast<double>(a_num) / static_cast<double>(a_den);

    const BinaryMask sk_pred = skeletonize(pred);
    std::size_t l_num = 0, l_den = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool sp = sk_pred.bits[i] != 0;
        const bool sg = ctx.skeleton.bits[i] != 0;
        if ((sp && ctx.dil_b.bits[i]) || (dil_pred_b->bits[i] && sg))
            ++l_num;
        if (sp || sg)
            ++l_den;
    }
    r.l = l_den > 0 ? static_cast<double>(l_num) / static_cast<double>(l_den) : 0.0;
    r.cal = r.c * r.a * r.l;
    return r;
}

} // namespace

CalResult cal(const BinaryMask& pred, const BinaryMask& gt, double alpha, double beta) {
    require_same_size(pred, gt, "cal");
    return cal_against(pred, make_cal_context(gt, alpha, beta), alpha, beta);
}

namespace {

BinaryMask masked_threshold(const GrayImage& resp, double t, const BinaryMask* fov) {
    BinaryMask pred = threshold_map(resp, t);
    if (fov)
        for (std::size_t i = 0; i < pred.size(); ++i)
            pred.bits[i] = pred.bits[i] & fov->bits[i];
    return pred;
}

void check_sweep_inputs(const std::vector<const GrayImage*>& responses,
                        const std::vector<const BinaryMask*>& gts,
                        const std::vector<const BinaryMask*>& fovs) {
    if (responses.empty() || responses.size() != gts.size())
        throw std::invalid_argument("sweep: need matched nonempty image sets");
    if (!fovs.empty() && fovs.size() != responses.size())
        throw std::invalid_argument("sweep: fov list length mismatch");
}

} // namespace

CalSweep sweep_cal(const std::vector<const GrayImage*>& responses,
                   const std::vector<const BinaryMask*>& gts,
                   const std::vector<const BinaryMask*>& fovs) {
    check_sweep_inputs(responses, gts, fovs);
    const std::vector<double> grid = threshold_grid();
    const std::size_t n_img = responses.size();

    std::vector<std::vector<CalResult>> scores(n_img, std::vector<CalResult>(grid.size()));
    detail::parallel_for(n_img, 0, [&](std::size_t i) {
        const CalGtContext ctx = make_cal_context(*gts[i], 2.0, 2.0);
        const BinaryMask* fov = fovs.empty() ? nullptr : fovs[i];
        for (std::size_t k = 0; k < grid.size(); ++k)
            scores[i][k] = cal_against(masked_threshold(*responses[i], grid[k], fov), ctx,
                                       2.0, 2.0);
    });

    CalSweep res;
    std::size_t best_k = 0;
    double best = -1.0;
    res.curve.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double avg = 0.0;
        for (std::size_t i = 0; i < n_img; ++i)
            avg += scores[i][k].cal;
        avg /= static_cast<double>(n_img);
        res.curve.push_back({grid[k], avg});
        if (avg > best) {
            best = avg;
            best_k = k;
        }
    }
    res.t_star = grid[best_k];
    res.per_image.resize(n_img);
    for (std::size_t i = 0; i < n_img; ++i) {
        res.per_image[i] = scores[i][best_k];
        res.averages.c += scores[i][best_k].c;
        res.averages.a += scores[i][best_k].a;
        res.averages.l += scores[i][best_k].l;
        res.averages.cal += scores[i][best_k].cal;
    }
    res.averages.c /= static_cast<double>(n_img);
    res.averages.a /= static_cast<double>(n_img);
    res.averages.l /= static_cast<double>(n_img);
    res.averages.cal /= static_cast<double>(n_img);
    return res;
}

MccSweep sweep_mcc(const std::vector<const GrayImage*>& responses,
                   const std::vector<const BinaryMask*>& gts,
                   const std::vector<const BinaryMask*>& fovs) {
    check_sweep_inputs(responses, gts, fovs);
    const std::vector<double> grid = threshold_grid();
    const std::size_t n_img = responses.size();

    std::vector<std::vector<double>> scores(n_img, std::vector<double>(grid.size()));
    detail::parallel_for(n_img, 0, [&](std::size_t i) {
        const BinaryMask* fov = fovs.empty() ? nullptr : fovs[i];
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const BinaryMask pred = threshold_map(*responses[i], grid[k]);
            scores[i][k] = mcc(pred, *gts[i], fov);
        }
    });

    MccSweep res;
    std::size_t best_k = 0;
    double best = -2.0;
    res.curve.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double avg = 0.0;
        for (std::size_t i = 0; i < n_img; ++i)
            avg += scores[i][k];
        avg /= static_cast<double>(n_img);
        res.curve.push_back({grid[k], avg});
        if (avg > best) {
            best = avg;
            best_k = k;
        }
    }
    res.t_star = grid[best_k];
    res.avg_mcc = res.curve[best_k][1];
    res.per_image.resize(n_img);
    for (std::size_t i = 0; i < n_img; ++i)
        res.per_image[i] = scores[i][best_k];
    return res;
}

double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("wilcoxon_signed_rank: length mismatch");
    if (a.size() < 6)
        throw std::invalid_argument("wilcoxon_signed_rank: need at least 6 pairs");

    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0)
            diffs.push_back(d);
    }
    const std::size_t n = diffs.size();
    if (n == 0)
        return 1.0;

    // rank |d| ascending, average ranks over ties
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return std::fabs(diffs[i]) < std::fabs(diffs[j]);
    });
    std::vector<double> rank(n, 0.0);
    std::vector<std::size_t> tie_sizes;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
            ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            rank[order[k]] = avg;
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0.0)
            w_plus += rank[i];

    if (n <= 25) {
        // exact null distribution over doubled ranks (integers even with ties)
        std::vector<long long> r2(n);
        long long total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::llround(2.0 * rank[i]);
            total2 += r2[i];
        }
        std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
        dist[0] = 1.0;
        long long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += r2[i];
            for (long long s = reach; s >= r2[i]; --s)
                dist[static_cast<std::size_t>(s)] += dist[static_cast<std::size_t>(s - r2[i])];
        }
        const double denom = std::ldexp(1.0, static_cast<int>(n)); // 2^n
        const long long w2 = std::llround(2.0 * w_plus);
        double cdf_le = 0.0, cdf_ge = 0.0;
        for (long long s = 0; s <= total2; ++s) {
            if (s <= w2) cdf_le += dist[static_cast<std::size_t>(s)];
            if (s >= w2) cdf_ge += dist[static_cast<std::size_t>(s)];
        }
        return std::min(1.0, 2.0 * std::min(cdf_le, cdf_ge) / denom);
    }

    // normal approximation with continuity correction and tie correction
    const double dn = static_cast<double>(n);
    const double mu = dn * (dn + 1.0) / 4.0;
    double tie_term = 0.0;
    for (std::size_t t : tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
    double z = w_plus - mu;
    if (std::fabs(z) <= 0.5)
        z = 0.0;
    else
        z = (z > 0.0 ? z - 0.5 : z + 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

} // namespace rustico
