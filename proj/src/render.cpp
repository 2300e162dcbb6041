#include "skewcert/render.hpp"

#include <algorithm>
#include <cmath>

namespace skewcert {

namespace {

std::vector<CellId> select_column(const Grid& zg, const RenderSpec& spec) {
    if (spec.z_cell) {
        if (*spec.z_cell >= zg.cell_count()) throw RenderError("z-cell id outside the z-grid");
        return {*spec.z_cell};
    }
    if (!spec.z_point) throw RenderError("no fiber selector given");
    const IndexRange cols = zg.cover(Interval(spec.z_point->real()));
    const IndexRange rows = zg.cover(Interval(spec.z_point->imag()));
    if (cols.empty() || rows.empty()) throw RenderError("z-point outside the model's base domain");
    std::vector<CellId> cells;
    for (std::uint32_t r = rows.first; r <= rows.last; ++r) {
        for (std::uint32_t c = cols.first; c <= cols.last; ++c) cells.push_back(zg.id(r, c));
    }
    return cells;
}

// Half-open pixel span [first, last) covered by [lo, hi] on an axis of n
// pixels spanning [a, b]; at least one pixel when the interval meets the axis.
std::pair<int, int> pixel_span(double lo, double hi, double a, double b, int n) {
    if (hi < a || lo > b) return {0, 0};
    const double scale = n / (b - a);
    int first = static_cast<int>(std::floor((lo - a) * scale));
    int last = static_cast<int>(std::ceil((hi - a) * scale));
    first = std::clamp(first, 0, n - 1);
    last = std::clamp(last, first + 1, n);
    return {first, last};
}

}  // namespace

std::string FiberImage::ppm() const {
    std::string s = "P6\n" + std::to_string(width) + ' ' + std::to_string(height) + "\n255\n";
    s.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return s;
}

FiberImage render_fiber(const ChainModel& model, const RenderSpec& spec) {
    if (!model.is_fibered()) throw RenderError("rendering needs a fibered model");
    if (spec.width <= 0 || spec.height <= 0) throw RenderError("image size must be positive");
    const Grid& zg = model.provenance.zgrid;
    const Grid& wg = *model.provenance.wgrid;
    const double R = wg.half_width;
    const Window win = spec.window.value_or(Window{-R, R, -R, R});
    if (!(win.re_lo < win.re_hi && win.im_lo < win.im_hi)) throw RenderError("empty render window");

    FiberImage img;
    img.width = spec.width;
    img.height = spec.height;
    img.z_cells = select_column(zg, spec);

    struct Hit {
        std::size_t component;
        BoxId box;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < model.components.size(); ++i) {
        for (const BoxId& b : model.components[i].boxes) {
            if (std::binary_search(img.z_cells.begin(), img.z_cells.end(), b.z)) hits.push_back({i, b});
        }
    }
    if (hits.empty()) throw RenderError("no model boxes in the selected fiber column");

    for (const Hit& h : hits) img.components.push_back(h.component);
    img.components.erase(std::unique(img.components.begin(), img.components.end()), img.components.end());
    const std::size_t n = img.components.size();
    for (std::size_t k = 0; k < n; ++k) {
        img.gray.push_back(static_cast<std::uint8_t>(n > 1 ? (k * 200) / (n - 1) % 201 : 0));
    }

    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 255);
    for (const Hit& h : hits) {
        const std::size_t slot =
            static_cast<std::size_t>(std::lower_bound(img.components.begin(), img.components.end(), h.component) -
                                     img.components.begin());
        const std::uint8_t g = img.gray[slot];
        const ComplexBox cell = wg.cell_box(h.box.w);
        const auto [x0, x1] = pixel_span(cell.re.lo(), cell.re.hi(), win.re_lo, win.re_hi, img.width);
        // Image rows run downwards from the top of the window.
        const auto [y0, y1] = pixel_span(win.im_hi - cell.im.hi(), win.im_hi - cell.im.lo(), 0, win.im_hi - win.im_lo,
                                         img.height);
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                std::uint8_t* px = &img.rgb[(static_cast<std::size_t>(y) * img.width + x) * 3];
                px[0] = px[1] = px[2] = g;
            }
        }
    }
    return img;
}

std::vector<BoxId> column_boxes(const ChainModel& model, const FiberImage& image, std::size_t component) {
    std::vector<BoxId> out;
    for (const BoxId& b : model.components.at(component).boxes) {
        if (std::binary_search(image.z_cells.begin(), image.z_cells.end(), b.z)) out.push_back(b);
    }
    return out;
}

}  // namespace skewcert
