//! Variable-length quantities as used for delta times and meta lengths.

use super::SmfError;

/// Largest value a four-byte VLQ can carry (2²⁸ − 1).
pub const VLQ_MAX: u32 = 0x0FFF_FFFF;

/// Reads one VLQ from the front of `bytes`, returning the value and the number
/// of bytes consumed.
pub fn read_vlq(bytes: &[u8]) -> Result<(u32, usize), SmfError> {
    let mut value: u32 = 0;
    for i in 0..4 {
        let b = *bytes.get(i).ok_or(SmfError::UnexpectedEof)?;
        value = (value << 7) | u32::from(b & 0x7F);
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(SmfError::MalformedVlq)
}

/// Appends the shortest VLQ encoding of `value` to `out`.
///
/// Values above [`VLQ_MAX`] cannot be represented and are saturated.
pub fn write_vlq(value: u32, out: &mut Vec<u8>) {
    let value = value.min(VLQ_MAX);
    let mut buf = [0u8; 4];
    let mut n = 0;
    let mut v = value;
    loop {
        buf[n] = (v & 0x7F) as u8;
        n += 1;
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        let cont = if i > 0 { 0x80 } else { 0 };
        out.push(buf[i] | cont);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_single_zero_byte() {
        assert_eq!(read_vlq(&[0x00]).unwrap(), (0, 1));
    }

    #[test]
    fn reads_two_byte_value() {
        assert_eq!(read_vlq(&[0x81, 0x00]).unwrap(), (128, 2));
    }

    #[test]
    fn reads_maximum_value() {
        assert_eq!(read_vlq(&[0xFF, 0xFF, 0xFF, 0x7F]).unwrap(), (268_435_455, 4));
    }

    #[test]
    fn stops_at_terminator_and_ignores_trailing_bytes() {
        assert_eq!(read_vlq(&[0x40, 0xFF, 0xFF]).unwrap(), (0x40, 1));
    }

    #[test]
    fn five_byte_vlq_is_malformed() {
        assert!(matches!(
            read_vlq(&[0x81, 0x80, 0x80, 0x80, 0x00]),
            Err(SmfError::MalformedVlq)
        ));
    }

    #[test]
    fn exhausted_stream_is_eof() {
        assert!(matches!(read_vlq(&[]), Err(SmfError::UnexpectedEof)));
        assert!(matches!(read_vlq(&[0x81, 0x80]), Err(SmfError::UnexpectedEof)));
    }

    #[test]
    fn writes_known_encodings() {
        let cases: [(u32, &[u8]); 5] = [
            (0, &[0x00]),
            (0x7F, &[0x7F]),
            (0x80, &[0x81, 0x00]),
            (0x3FFF, &[0xFF, 0x7F]),
            (VLQ_MAX, &[0xFF, 0xFF, 0xFF, 0x7F]),
        ];
        for (v, enc) in cases {
            let mut out = Vec::new();
            write_vlq(v, &mut out);
            assert_eq!(out, enc, "value {v:#x}");
        }
    }

    proptest! {
        #[test]
        fn value_round_trip(n in 0u32..=VLQ_MAX) {
            let mut out = Vec::new();
            write_vlq(n, &mut out);
            prop_assert_eq!(read_vlq(&out).unwrap(), (n, out.len()));
        }

        #[test]
        fn canonical_bytes_round_trip(n in 0u32..=VLQ_MAX) {
            let mut canonical = Vec::new();
            write_vlq(n, &mut canonical);
            let (v, used) = read_vlq(&canonical).unwrap();
            let mut again = Vec::new();
            write_vlq(v, &mut again);
            prop_assert_eq!(&again[..], &canonical[..used]);
        }
    }
}
