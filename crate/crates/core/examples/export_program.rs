//! Pulse-by-pulse listing of a short Gaussian-windowed modulated sequence.

use dysco::build_dysco_modulated;
use dysco::constants::RABI_REFERENCE;
use dysco::pulse::Window;

fn main() -> dysco::Result<()> {
    let prog = build_dysco_modulated(2, 250e3, 0.8, Window::Gaussian, RABI_REFERENCE)?;
    print!("{}", prog.export().render());
    Ok(())
}
