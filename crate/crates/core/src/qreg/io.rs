use std::io::{Read, Write};

use num_complex::Complex64;

use super::{GridSpec, QregError, QuantumRegister, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"QREG";
pub const BINARY_VERSION: u32 = 1;

impl QuantumRegister {
    /// Position-space snapshot as `n,x,Re(a),Im(a),|a|^2` rows.
    /// Multi-axis registers list the coordinates `x_0,x_1,...` instead of `x`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let reg = self.clone().into_position();
        let grid = reg.grid();
        if grid.axes() == 1 {
            writeln!(w, "n,x,Re(a),Im(a),|a|^2")?;
        } else {
            let xs: Vec<String> = (0..grid.axes()).map(|a| format!("x_{a}")).collect();
            writeln!(w, "n,{},Re(a),Im(a),|a|^2", xs.join(","))?;
        }
        for (n, a) in reg.amplitudes().iter().enumerate() {
            let coords: Vec<String> = grid.coordinates(n).iter().map(|x| crate::format_f64(*x)).collect();
            writeln!(
                w,
                "{n},{},{},{},{}",
                coords.join(","),
                crate::format_f64(a.re),
                crate::format_f64(a.im),
                crate::format_f64(a.norm_sqr())
            )?;
        }
        Ok(())
    }

    /// Little-endian dump: header then interleaved position-space Re/Im.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let reg = self.clone().into_position();
        let grid = reg.grid();
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&BINARY_VERSION.to_le_bytes())?;
        w.write_all(&(grid.axes() as u32).to_le_bytes())?;
        for a in 0..grid.axes() {
            w.write_all(&(grid.bits(a) as f64).to_le_bytes())?;
            w.write_all(&grid.spacing(a).to_le_bytes())?;
            w.write_all(&grid.origin(a).to_le_bytes())?;
        }
        w.write_all(&grid.hbar().to_le_bytes())?;
        for z in reg.amplitudes() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(QregError::Format("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != BINARY_VERSION {
            return Err(QregError::Format(format!("unsupported version {version}")));
        }
        let axes = read_u32(&mut r)? as usize;
        if axes == 0 || axes > 64 {
            return Err(QregError::Format(format!("implausible axis count {axes}")));
        }
        let (mut bits, mut spacing, mut origin) = (vec![], vec![], vec![]);
        for _ in 0..axes {
            let k = read_f64(&mut r)?;
            if k.fract() != 0.0 || !(1.0..=64.0).contains(&k) {
                return Err(QregError::Format(format!("bad bit count {k}")));
            }
            bits.push(k as u32);
            spacing.push(read_f64(&mut r)?);
            origin.push(read_f64(&mut r)?);
        }
        let hbar = read_f64(&mut r)?;
        let grid = GridSpec::new(bits, spacing, origin, hbar)?;
        let mut amps = Vec::with_capacity(grid.total_points());
        for _ in 0..grid.total_points() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            amps.push(Complex64::new(re, im));
        }
        let mut reg = QuantumRegister::from_amplitudes(grid, amps.clone())?;
        reg.amplitudes_mut().copy_from_slice(&amps);
        Ok(reg)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
