#include "vqad/fusion.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "vqad/errors.hpp"

namespace vqad {

BinaryMask binarize(const MapF& map, float lambda) {
    BinaryMask out(map.h, map.w);
    for (std::size_t i = 0; i < map.size(); ++i)
        out.v[i] = map.v[i] >= lambda ? std::uint8_t(1) : std::uint8_t(0);
    return out;
}

ComponentSet label_components(const BinaryMask& mask, Connectivity conn) {
    static constexpr std::array<std::pair<int, int>, 8> offsets{{{-1, 0},
                                                                 {1, 0},
                                                                 {0, -1},
                                                                 {0, 1},
                                                                 {-1, -1},
                                                                 {-1, 1},
                                                                 {1, -1},
                                                                 {1, 1}}};
    const int n_off = conn == Connectivity::eight ? 8 : 4;

    ComponentSet cs;
    cs.labels = Grid<std::int32_t>(mask.h, mask.w, 0);
    std::vector<int> queue;
    for (int y = 0; y < mask.h; ++y) {
        for (int x = 0; x < mask.w; ++x) {
            if (!mask.at(y, x) || cs.labels.at(y, x) != 0) continue;
            Component comp;
            comp.id = static_cast<int>(cs.comps.size()) + 1;
            comp.min_x = comp.max_x = x;
            comp.min_y = comp.max_y = y;
            queue.clear();
            queue.push_back(y * mask.w + x);
            cs.labels.at(y, x) = comp.id;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const int p = queue[head];
                const int py = p / mask.w, px = p % mask.w;
                comp.pixels.push_back(p);
                comp.min_x = std::min(comp.min_x, px);
                comp.max_x = std::max(comp.max_x, px);
                comp.min_y = std::min(comp.min_y, py);
                comp.max_y = std::max(comp.max_y, py);
                for (int o = 0; o < n_off; ++o) {
                    const int ny = py + offsets[static_cast<std::size_t>(o)].first;
                    const int nx = px + offsets[static_cast<std::size_t>(o)].second;
                    if (ny < 0 || ny >= mask.h || nx < 0 || nx >= mask.w) continue;
                    if (!mask.at(ny, nx) || cs.labels.at(ny, nx) != 0) continue;
                    cs.labels.at(ny, nx) = comp.id;
                    queue.push_back(ny * mask.w + nx);
                }
            }
            comp.area = static_cast<long>(comp.pixels.size());
            cs.comps.push_back(std::move(comp));
        }
    }
    return cs;
}

BinaryMask hysteresis_select(const MapF& sm, const MapF& am, float lambda_sm, float lambda_am,
                             Connectivity conn) {
    require_same_shape(sm, am, "hysteresis_select");
    const BinaryMask sm_mask = binarize(sm, lambda_sm);
    const BinaryMask am_mask = binarize(am, lambda_am);
    const ComponentSet cs = label_components(sm_mask, conn);

    std::vector<std::uint8_t> keep(cs.comps.size() + 1, 0);
    for (std::size_t i = 0; i < am_mask.size(); ++i)
        if (am_mask.v[i] && cs.labels.v[i] != 0)
            keep[static_cast<std::size_t>(cs.labels.v[i])] = 1;

    BinaryMask out(sm.h, sm.w);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = cs.labels.v[i] != 0 && keep[static_cast<std::size_t>(cs.labels.v[i])]
                       ? std::uint8_t(1)
                       : std::uint8_t(0);
    return out;
}

}  // namespace vqad
