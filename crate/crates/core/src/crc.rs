// SPDX-License-Identifier: Apache-2.0

//! IEEE 802.3 CRC-32 (reflected polynomial 0xEDB88320, init and final xor
//! all-ones).

const POLY: u32 = 0xEDB8_8320;

static TABLE: [u32; 256] = build_table();

const fn build_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u32;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 1 != 0 {
                (crc >> 1) ^ POLY
            } else {
                crc >> 1
            };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

/// Running CRC register, as kept by the ingress parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc32 {
    reg: u32,
}

impl Crc32 {
    pub const fn new() -> Self {
        Self { reg: 0xFFFF_FFFF }
    }

    #[inline]
    pub fn update_byte(&mut self, byte: u8) {
        let i = ((self.reg ^ byte as u32) & 0xFF) as usize;
        self.reg = (self.reg >> 8) ^ TABLE[i];
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.update_byte(b);
        }
    }

    pub fn finalize(&self) -> u32 {
        !self.reg
    }
}

impl Default for Crc32 {
    fn default() -> Self {
        Self::new()
    }
}

pub fn crc32(bytes: &[u8]) -> u32 {
    let mut crc = Crc32::new();
    crc.update(bytes);
    crc.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_matches_one_shot() {
        let data = b"The quick brown fox jumps over the lazy dog";
        let mut crc = Crc32::new();
        for chunk in data.chunks(5) {
            crc.update(chunk);
        }
        assert_eq!(crc.finalize(), crc32(data));
        assert_eq!(crc32(data), 0x414F_A339);
    }
}
