//! Thin command-line front end; placeholder until the library settles.

fn main() {
    eprintln!("command-line interface under construction");
    std::process::exit(2);
}
