fn main() {
    std::process::exit(voronoi_shaping::harness::run());
}
