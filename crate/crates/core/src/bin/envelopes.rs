fn main() {
    std::process::exit(two_envelopes::cli::dispatch());
}
