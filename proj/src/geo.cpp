#include "agentk/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "agentk/scheduler.hpp"

namespace agentk::geo {

namespace {
constexpr double kPi = 3.14159265358979323846;
double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }
}  // namespace

Image Image::solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
        img.rgb[i] = r;
        img.rgb[i + 1] = g;
        img.rgb[i + 2] = b;
    }
    return img;
}

std::size_t Image::pixel_offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
}

void Image::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t o = pixel_offset(x, y);
    rgb[o] = r;
    rgb[o + 1] = g;
    rgb[o + 2] = b;
}

std::array<std::uint8_t, 3> Image::pixel(int x, int y) const {
    const std::size_t o = pixel_offset(x, y);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
}

void Image::fill_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int x0 = std::max(0, x), y0 = std::max(0, y);
    const int x1 = std::min(width, x + w), y1 = std::min(height, y + h);
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) set_pixel(xx, yy, r, g, b);
    }
}

void RelBox::validate() const {
    if (!(0.0 <= x_min && x_min < x_max && x_max <= 1.0) ||
        !(0.0 <= y_min && y_min < y_max && y_max <= 1.0)) {
        fail(Errc::invalid_box, "relative box must satisfy 0 <= min < max <= 1 on both axes");
    }
}

double normalize_heading(double degrees) {
    double h = std::fmod(degrees, 360.0);
    if (h < 0) h += 360.0;
    if (h >= 360.0) h = 0.0;
    return h;
}

double normalize_lon(double degrees) {
    double lon = std::fmod(degrees + 180.0, 360.0);
    if (lon < 0) lon += 360.0;
    lon -= 180.0;
    if (lon == -180.0) lon = 180.0;
    return lon;
}

PixelBox to_absolute(const RelBox& r, int width, int height) {
    r.validate();
    if (width < 1 || height < 1) fail(Errc::invalid_argument, "image dimensions must be >= 1");
    auto px = [](double v, int extent) {
        const int p = static_cast<int>(std::floor(v * extent + 0.5));
        return std::clamp(p, 0, extent);
    };
    PixelBox b{px(r.x_min, width), px(r.y_min, height), px(r.x_max, width), px(r.y_max, height)};
    if (b.x_min >= b.x_max || b.y_min >= b.y_max) {
        fail(Errc::degenerate_box, "rounding collapsed the box to zero area");
    }
    return b;
}

Image crop(const Image& image, const PixelBox& box) {
    if (box.x_min < 0 || box.y_min < 0 || box.x_max > image.width || box.y_max > image.height ||
        box.width() <= 0 || box.height() <= 0) {
        fail(Errc::box_out_of_bounds, "crop box outside image bounds");
    }
    Image out;
    out.width = box.width();
    out.height = box.height();
    out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    for (int y = 0; y < out.height; ++y) {
        const std::size_t src = image.pixel_offset(box.x_min, box.y_min + y);
        const std::size_t dst = out.pixel_offset(0, y);
        std::copy_n(image.rgb.begin() + static_cast<std::ptrdiff_t>(src),
                    static_cast<std::size_t>(out.width) * 3,
                    out.rgb.begin() + static_cast<std::ptrdiff_t>(dst));
    }
    return out;
}

Panorama stitch_panorama(const std::vector<Image>& tiles, double base_heading) {
    if (tiles.size() != 4) fail(Errc::tile_mismatch, "panorama needs exactly 4 tiles");
    const int w = tiles[0].width, h = tiles[0].height;
    if (w < 1 || h < 1) fail(Errc::tile_mismatch, "empty tile");
    for (const auto& t : tiles) {
        if (t.width != w || t.height != h) fail(Errc::tile_mismatch, "tile dimensions differ");
    }
    Panorama pano;
    pano.base_heading = normalize_heading(base_heading);
    pano.tile_width = w;
    pano.tile_height = h;
    pano.composite.width = 4 * w;
    pano.composite.height = h;
    pano.composite.rgb.resize(static_cast<std::size_t>(4 * w) * h * 3);
    for (int k = 0; k < 4; ++k) {
        pano.tiles[static_cast<std::size_t>(k)] = tiles[static_cast<std::size_t>(k)];
        for (int y = 0; y < h; ++y) {
            const std::size_t src = tiles[static_cast<std::size_t>(k)].pixel_offset(0, y);
            const std::size_t dst = pano.composite.pixel_offset(k * w, y);
            std::copy_n(tiles[static_cast<std::size_t>(k)].rgb.begin() +
                            static_cast<std::ptrdiff_t>(src),
                        static_cast<std::size_t>(w) * 3,
                        pano.composite.rgb.begin() + static_cast<std::ptrdiff_t>(dst));
        }
    }
    return pano;
}

GeoPose displace(const GeoPose& pose, double distance_m, double bearing_deg) {
    if (distance_m < 0) fail(Errc::invalid_argument, "distance must be >= 0");
    if (std::fabs(pose.lat) >= 89.0) {
        fail(Errc::pole_proximity, "flat-earth displacement is invalid above 89 degrees latitude");
    }
    const double b = deg2rad(bearing_deg);
    const double dlat = distance_m * std::cos(b) / kEarthRadiusM;
    const double dlon = distance_m * std::sin(b) / (kEarthRadiusM * std::cos(deg2rad(pose.lat)));
    GeoPose out;
    out.lat = pose.lat + rad2deg(dlat);
    out.lon = normalize_lon(pose.lon + rad2deg(dlon));
    out.heading = pose.heading;
    if (std::fabs(out.lat) >= 89.0) {
        fail(Errc::pole_proximity, "displacement crossed into the polar exclusion zone");
    }
    return out;
}

double bearing_from_crop(const PixelBox& box, const Panorama& pano) {
    const int cw = pano.composite.width;
    if (box.x_min < 0 || box.x_max > cw || box.y_min < 0 || box.y_max > pano.composite.height ||
        box.width() <= 0 || box.height() <= 0) {
        fail(Errc::box_out_of_bounds, "crop box outside panorama composite");
    }
    const double center_x = (static_cast<double>(box.x_min) + box.x_max) / 2.0;
    return normalize_heading(pano.base_heading + 360.0 * center_x / cw);
}

RefineResult refine_image(const Image& image, const std::string& question, VisionBackend& vlm,
                          int max_depth) {
    if (image.empty()) fail(Errc::invalid_argument, "refine_image on empty image");
    if (max_depth < 1) fail(Errc::invalid_argument, "max_depth must be >= 1");
    RefineResult result;
    Image current = image;
    for (int call = 0; call < max_depth; ++call) {
        const VisionReply reply = vlm.refine_or_answer(current, question);
        if (reply.is_answer) {
            result.answer = reply.answer;
            return result;
        }
        const PixelBox box = to_absolute(reply.box, current.width, current.height);
        result.crop_boxes.push_back(box);
        ++result.crops;
        current = crop(current, box);
    }
    result.depth_exceeded = true;
    return result;
}

LocateResult locate_target(const Panorama& pano, const std::string& target, VisionBackend& vlm,
                           std::size_t max_parallel) {
    if (pano.composite.empty()) fail(Errc::invalid_argument, "locate_target on empty panorama");
    const int cw = pano.composite.width;
    const int ch = pano.composite.height;
    const int ww = cw / 4;
    const int stride = ww / 2;

    std::vector<PixelBox> windows;
    for (int k = 0; k < 6; ++k) {
        const int x0 = k * stride;
        windows.push_back(PixelBox{x0, 0, x0 + ww, ch});
    }

    LocateResult result;
    std::function<bool(const PixelBox&, std::size_t)> probe = [&](const PixelBox& box, std::size_t) {
        return vlm.confirm_target(crop(pano.composite, box), target);
    };
    for (std::size_t base = 0; base < windows.size(); base += max_parallel) {
        const std::size_t end = std::min(base + max_parallel, windows.size());
        std::vector<PixelBox> chunk(windows.begin() + static_cast<std::ptrdiff_t>(base),
                                    windows.begin() + static_cast<std::ptrdiff_t>(end));
        const auto hits = scheduler::parallel_ordered<PixelBox, bool>(chunk, probe, max_parallel);
        result.queries += static_cast<int>(chunk.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (hits[i]) {
                result.found = true;
                result.box = chunk[i];
                return result;
            }
        }
    }
    return result;
}

// ---- simulated street-view provider -----------------------------------------

std::string StreetWorld::pose_key(double lat, double lon, double heading) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.5f,%.5f,%d", lat, lon,
                  static_cast<int>(std::llround(normalize_heading(heading))));
    return buf;
}

StreetWorld StreetWorld::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open world file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(Errc::io_error, "malformed world file: " + path);
    return parse(j);
}

StreetWorld StreetWorld::parse(const json& j) {
    StreetWorld world;
    world.tile_width_ = j.value("tile_width", 64);
    world.tile_height_ = j.value("tile_height", 48);
    if (j.contains("default_fill")) {
        const auto& f = j.at("default_fill");
        world.default_fill_ = {f.at(0).get<std::uint8_t>(), f.at(1).get<std::uint8_t>(),
                               f.at(2).get<std::uint8_t>()};
    }
    for (const auto& t : j.value("tiles", json::array())) {
        TileSpec spec;
        spec.fill = world.default_fill_;
        if (t.contains("fill")) {
            const auto& f = t.at("fill");
            spec.fill = {f.at(0).get<std::uint8_t>(), f.at(1).get<std::uint8_t>(),
                         f.at(2).get<std::uint8_t>()};
        }
        for (const auto& feat : t.value("features", json::array())) {
            TileSpec::Feature f;
            f.x = feat.value("x", 0);
            f.y = feat.value("y", 0);
            f.w = feat.value("w", 1);
            f.h = feat.value("h", 1);
            f.label = feat.value("label", "");
            if (feat.contains("color")) {
                const auto& c = feat.at("color");
                f.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                           c.at(2).get<std::uint8_t>()};
            }
            spec.features.push_back(f);
        }
        world.tiles_[pose_key(t.value("lat", 0.0), t.value("lon", 0.0), t.value("heading", 0.0))] =
            std::move(spec);
    }
    return world;
}

Image StreetWorld::render(const TileSpec& spec) const {
    Image img = Image::solid(tile_width_, tile_height_, spec.fill[0], spec.fill[1], spec.fill[2]);
    for (const auto& f : spec.features) {
        img.fill_rect(f.x, f.y, f.w, f.h, f.color[0], f.color[1], f.color[2]);
    }
    return img;
}

Image StreetWorld::tile_at(const GeoPose& pose) const {
    const auto it = tiles_.find(pose_key(pose.lat, pose.lon, pose.heading));
    if (it == tiles_.end()) {
        TileSpec blank;
        blank.fill = default_fill_;
        return render(blank);
    }
    return render(it->second);
}

Panorama StreetWorld::panorama_at(const GeoPose& pose) const {
    std::vector<Image> tiles;
    for (int k = 0; k < 4; ++k) {
        GeoPose p = pose;
        p.heading = normalize_heading(pose.heading + 90.0 * k);
        tiles.push_back(tile_at(p));
    }
    return stitch_panorama(tiles, pose.heading);
}

}  // namespace agentk::geo
