//! BioSemi BDF reader and writer.
//!
//! Layout: a 256-byte main header (byte 0 is `0xFF`, bytes 1..8 are
//! `BIOSEMI`), one 256-byte header block per channel stored field-major,
//! then data records. Each record holds, for every channel in order,
//! `samples_per_record` 24-bit little-endian two's-complement integers.

use crate::error::{Error, Result};
use crate::signal::Signal;

const MAIN_HEADER_LEN: usize = 256;
const CHANNEL_HEADER_LEN: usize = 256;
const MAGIC: &[u8; 8] = b"\xffBIOSEMI";
const BYTES_PER_SAMPLE: usize = 3;

pub const DIGITAL_MIN_24: i32 = -(1 << 23);
pub const DIGITAL_MAX_24: i32 = (1 << 23) - 1;

/// Per-channel header block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelHeader {
    pub label: String,
    pub transducer: String,
    pub physical_dimension: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefiltering: String,
    pub samples_per_record: usize,
    pub reserved: String,
}

impl ChannelHeader {
    /// A channel header with the full 24-bit digital range and µV units.
    pub fn new(label: impl Into<String>, physical_min: f64, physical_max: f64, samples: usize) -> Self {
        Self {
            label: label.into(),
            transducer: String::new(),
            physical_dimension: "uV".into(),
            physical_min,
            physical_max,
            digital_min: DIGITAL_MIN_24,
            digital_max: DIGITAL_MAX_24,
            prefiltering: String::new(),
            samples_per_record: samples,
            reserved: String::new(),
        }
    }

    fn gain(&self) -> f64 {
        (self.physical_max - self.physical_min) / f64::from(self.digital_max - self.digital_min)
    }

    /// Affine digital → physical map; `digital_min` and `digital_max` land
    /// exactly on the physical bounds.
    pub fn to_physical(&self, digital: i32) -> f64 {
        if digital == self.digital_max {
            return self.physical_max;
        }
        self.physical_min + f64::from(digital - self.digital_min) * self.gain()
    }

    /// Inverse of [`to_physical`](Self::to_physical), rounded to the nearest
    /// code and clamped to the digital range.
    pub fn to_digital(&self, physical: f64) -> i32 {
        let d = f64::from(self.digital_min) + (physical - self.physical_min) / self.gain();
        d.round()
            .clamp(f64::from(self.digital_min), f64::from(self.digital_max)) as i32
    }

    fn validate(&self) -> Result<()> {
        if !(self.physical_max > self.physical_min) {
            return Err(Error::Format(format!(
                "channel `{}`: physical max {} not above physical min {}",
                self.label, self.physical_max, self.physical_min
            )));
        }
        if self.digital_max <= self.digital_min {
            return Err(Error::Format(format!(
                "channel `{}`: digital max {} not above digital min {}",
                self.label, self.digital_max, self.digital_min
            )));
        }
        if self.digital_min < DIGITAL_MIN_24 || self.digital_max > DIGITAL_MAX_24 {
            return Err(Error::Format(format!(
                "channel `{}`: digital range [{}, {}] exceeds 24 bits",
                self.label, self.digital_min, self.digital_max
            )));
        }
        if self.samples_per_record == 0 {
            return Err(Error::Format(format!(
                "channel `{}`: zero samples per record",
                self.label
            )));
        }
        Ok(())
    }
}

/// Main header fields.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfHeader {
    pub patient: String,
    pub recording: String,
    pub start_date: String,
    pub start_time: String,
    pub reserved: String,
    pub num_records: usize,
    pub record_duration: f64,
    pub channels: Vec<ChannelHeader>,
}

impl BdfHeader {
    pub fn new(num_records: usize, record_duration: f64, channels: Vec<ChannelHeader>) -> Self {
        Self {
            patient: String::new(),
            recording: String::new(),
            start_date: "01.01.00".into(),
            start_time: "00.00.00".into(),
            reserved: "24BIT".into(),
            num_records,
            record_duration,
            channels,
        }
    }

    pub fn header_bytes(&self) -> usize {
        MAIN_HEADER_LEN + CHANNEL_HEADER_LEN * self.channels.len()
    }

    fn record_bytes(&self) -> usize {
        self.channels
            .iter()
            .map(|c| c.samples_per_record * BYTES_PER_SAMPLE)
            .sum()
    }
}

/// A parsed recording: header, raw digital codes and scaled channels.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfRecording {
    pub header: BdfHeader,
    digital: Vec<Vec<i32>>,
    channels: Vec<Signal>,
    clamped: Vec<usize>,
}

impl BdfRecording {
    /// Builds a recording from raw digital codes. Codes outside a channel's
    /// declared digital range are clamped before scaling and counted.
    pub fn from_digital(header: BdfHeader, digital: Vec<Vec<i32>>) -> Result<Self> {
        if !(header.record_duration.is_finite() && header.record_duration > 0.0) {
            return Err(Error::Format(format!(
                "record duration must be positive, got {}",
                header.record_duration
            )));
        }
        if digital.len() != header.channels.len() {
            return Err(Error::Format(format!(
                "{} digital channels for {} channel headers",
                digital.len(),
                header.channels.len()
            )));
        }
        let mut channels = Vec::with_capacity(digital.len());
        let mut clamped = Vec::with_capacity(digital.len());
        for (ch, codes) in header.channels.iter().zip(&digital) {
            ch.validate()?;
            let expected = header.num_records * ch.samples_per_record;
            if codes.len() != expected {
                return Err(Error::Format(format!(
                    "channel `{}` has {} samples, header implies {expected}",
                    ch.label,
                    codes.len()
                )));
            }
            let mut n_clamped = 0;
            let samples = codes
                .iter()
                .map(|&d| {
                    let c = d.clamp(ch.digital_min, ch.digital_max);
                    if c != d {
                        n_clamped += 1;
                    }
                    ch.to_physical(c)
                })
                .collect();
            if n_clamped > 0 {
                log::warn!(
                    "channel `{}`: {n_clamped} samples outside digital range clamped",
                    ch.label
                );
            }
            let fs = ch.samples_per_record as f64 / header.record_duration;
            channels.push(Signal::new(samples, fs, ch.label.clone())?);
            clamped.push(n_clamped);
        }
        Ok(Self {
            header,
            digital,
            channels,
            clamped,
        })
    }

    /// Quantizes physical signals into a recording. Each channel's physical
    /// range is widened to cover its samples if needed.
    pub fn from_signals(signals: &[Signal], record_duration: f64) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::InvalidSignal("no channels to write".into()));
        }
        let mut headers = Vec::with_capacity(signals.len());
        let mut digital = Vec::with_capacity(signals.len());
        let mut num_records = None;
        for s in signals {
            let spr = s.fs() * record_duration;
            if (spr - spr.round()).abs() > 1e-9 || spr < 1.0 {
                return Err(Error::Config(format!(
                    "channel `{}`: fs {} Hz × record duration {record_duration} s is not a whole number of samples",
                    s.label(),
                    s.fs()
                )));
            }
            let spr = spr.round() as usize;
            if s.len() % spr != 0 {
                return Err(Error::Dimension(format!(
                    "channel `{}`: {} samples is not a multiple of {spr} samples per record",
                    s.label(),
                    s.len()
                )));
            }
            let n = s.len() / spr;
            if *num_records.get_or_insert(n) != n {
                return Err(Error::Dimension("channels span different numbers of records".into()));
            }
            let (lo, hi) = s
                .samples()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            // Integer bounds keep the 8-character header fields exact.
            let (lo, hi) = (lo.floor(), hi.ceil());
            let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
            let ch = ChannelHeader::new(s.label(), lo, hi, spr);
            digital.push(s.samples().iter().map(|&v| ch.to_digital(v)).collect());
            headers.push(ch);
        }
        let header = BdfHeader::new(num_records.unwrap_or(0), record_duration, headers);
        Self::from_digital(header, digital)
    }

    pub fn channels(&self) -> &[Signal] {
        &self.channels
    }

    pub fn digital(&self, channel: usize) -> &[i32] {
        &self.digital[channel]
    }

    /// Number of samples per channel that were clamped into the digital range.
    pub fn clamped_counts(&self) -> &[usize] {
        &self.clamped
    }

    pub fn labels(&self) -> Vec<String> {
        self.channels.iter().map(|c| c.label().to_string()).collect()
    }

    pub fn select_channel(&self, label: &str) -> Result<Signal> {
        self.channels
            .iter()
            .find(|c| c.label() == label)
            .cloned()
            .ok_or_else(|| Error::UnknownChannel {
                label: label.to_string(),
                available: self.labels(),
            })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Truncated {
                offset: self.bytes.len(),
                expected: end - self.bytes.len(),
            });
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn text(&mut self, n: usize) -> Result<String> {
        let raw = self.take(n)?;
        Ok(String::from_utf8_lossy(raw).trim_end().to_string())
    }

    fn number<T: std::str::FromStr>(&mut self, n: usize, field: &str) -> Result<T> {
        let text = self.text(n)?;
        text.trim().parse().map_err(|_| Error::HeaderField {
            field: field.to_string(),
            value: text,
        })
    }
}

pub fn read_bdf(bytes: &[u8]) -> Result<BdfRecording> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Format(
            "not a BDF file: expected 0xFF followed by \"BIOSEMI\"".into(),
        ));
    }
    let mut cur = Cursor {
        bytes,
        pos: MAGIC.len(),
    };
    let patient = cur.text(80)?;
    let recording = cur.text(80)?;
    let start_date = cur.text(8)?;
    let start_time = cur.text(8)?;
    let header_len: usize = cur.number(8, "number of bytes in header")?;
    let reserved = cur.text(44)?;
    let num_records: i64 = cur.number(8, "number of data records")?;
    let record_duration: f64 = cur.number(8, "duration of a data record")?;
    let ns: usize = cur.number(4, "number of signals")?;

    if num_records < 0 {
        return Err(Error::HeaderField {
            field: "number of data records".into(),
            value: num_records.to_string(),
        });
    }
    let num_records = num_records as usize;
    let expected_header = MAIN_HEADER_LEN + CHANNEL_HEADER_LEN * ns;
    if header_len != expected_header {
        return Err(Error::HeaderField {
            field: "number of bytes in header".into(),
            value: format!("{header_len} (expected {expected_header} for {ns} signals)"),
        });
    }

    // Channel blocks are stored field-major: all labels, then all transducers, ...
    let texts = |cur: &mut Cursor, n: usize| -> Result<Vec<String>> { (0..ns).map(|_| cur.text(n)).collect() };
    let labels = texts(&mut cur, 16)?;
    let transducers = texts(&mut cur, 80)?;
    let dims = texts(&mut cur, 8)?;
    let pmin: Vec<f64> = (0..ns)
        .map(|_| cur.number(8, "physical minimum"))
        .collect::<Result<_>>()?;
    let pmax: Vec<f64> = (0..ns)
        .map(|_| cur.number(8, "physical maximum"))
        .collect::<Result<_>>()?;
    let dmin: Vec<i32> = (0..ns)
        .map(|_| cur.number(8, "digital minimum"))
        .collect::<Result<_>>()?;
    let dmax: Vec<i32> = (0..ns)
        .map(|_| cur.number(8, "digital maximum"))
        .collect::<Result<_>>()?;
    let prefilter = texts(&mut cur, 80)?;
    let spr: Vec<usize> = (0..ns)
        .map(|_| cur.number(8, "number of samples in each data record"))
        .collect::<Result<_>>()?;
    let ch_reserved = texts(&mut cur, 32)?;

    let channels: Vec<ChannelHeader> = (0..ns)
        .map(|i| ChannelHeader {
            label: labels[i].clone(),
            transducer: transducers[i].clone(),
            physical_dimension: dims[i].clone(),
            physical_min: pmin[i],
            physical_max: pmax[i],
            digital_min: dmin[i],
            digital_max: dmax[i],
            prefiltering: prefilter[i].clone(),
            samples_per_record: spr[i],
            reserved: ch_reserved[i].clone(),
        })
        .collect();
    let header = BdfHeader {
        patient,
        recording,
        start_date,
        start_time,
        reserved,
        num_records,
        record_duration,
        channels,
    };

    let mut digital: Vec<Vec<i32>> = header
        .channels
        .iter()
        .map(|c| Vec::with_capacity(c.samples_per_record * num_records))
        .collect();
    for _ in 0..num_records {
        for (ch, out) in header.channels.iter().zip(digital.iter_mut()) {
            let raw = cur.take(ch.samples_per_record * BYTES_PER_SAMPLE)?;
            out.extend(raw.chunks_exact(BYTES_PER_SAMPLE).map(decode_i24));
        }
    }
    if cur.pos != bytes.len() {
        log::warn!(
            "{} trailing bytes after {num_records} data records ignored",
            bytes.len() - cur.pos
        );
    }
    BdfRecording::from_digital(header, digital)
}

pub fn write_bdf(rec: &BdfRecording) -> Result<Vec<u8>> {
    let h = &rec.header;
    let mut out = Vec::with_capacity(h.header_bytes() + h.num_records * h.record_bytes());
    out.extend_from_slice(MAGIC);
    put(&mut out, &h.patient, 80, "local patient identification")?;
    put(&mut out, &h.recording, 80, "local recording identification")?;
    put(&mut out, &h.start_date, 8, "startdate")?;
    put(&mut out, &h.start_time, 8, "starttime")?;
    put(&mut out, &h.header_bytes().to_string(), 8, "number of bytes in header")?;
    put(&mut out, &h.reserved, 44, "reserved")?;
    put(&mut out, &h.num_records.to_string(), 8, "number of data records")?;
    put(
        &mut out,
        &format_number(h.record_duration),
        8,
        "duration of a data record",
    )?;
    put(&mut out, &h.channels.len().to_string(), 4, "number of signals")?;

    let chs = &h.channels;
    for c in chs {
        put(&mut out, &c.label, 16, "label")?;
    }
    for c in chs {
        put(&mut out, &c.transducer, 80, "transducer type")?;
    }
    for c in chs {
        put(&mut out, &c.physical_dimension, 8, "physical dimension")?;
    }
    for c in chs {
        put(&mut out, &format_number(c.physical_min), 8, "physical minimum")?;
    }
    for c in chs {
        put(&mut out, &format_number(c.physical_max), 8, "physical maximum")?;
    }
    for c in chs {
        put(&mut out, &c.digital_min.to_string(), 8, "digital minimum")?;
    }
    for c in chs {
        put(&mut out, &c.digital_max.to_string(), 8, "digital maximum")?;
    }
    for c in chs {
        put(&mut out, &c.prefiltering, 80, "prefiltering")?;
    }
    for c in chs {
        put(
            &mut out,
            &c.samples_per_record.to_string(),
            8,
            "number of samples in each data record",
        )?;
    }
    for c in chs {
        put(&mut out, &c.reserved, 32, "reserved")?;
    }

    for r in 0..h.num_records {
        for (ch, codes) in chs.iter().zip(&rec.digital) {
            let spr = ch.samples_per_record;
            for &d in &codes[r * spr..(r + 1) * spr] {
                if !(DIGITAL_MIN_24..=DIGITAL_MAX_24).contains(&d) {
                    return Err(Error::Format(format!("digital value {d} does not fit 24 bits")));
                }
                out.extend_from_slice(&d.to_le_bytes()[..BYTES_PER_SAMPLE]);
            }
        }
    }
    Ok(out)
}

fn decode_i24(b: &[u8]) -> i32 {
    // Place the 3 bytes in the top of an i32, then arithmetic-shift down to sign-extend.
    i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8
}

fn put(out: &mut Vec<u8>, value: &str, width: usize, field: &str) -> Result<()> {
    if !value.is_ascii() || value.len() > width {
        return Err(Error::HeaderField {
            field: field.to_string(),
            value: value.to_string(),
        });
    }
    out.extend_from_slice(value.as_bytes());
    out.extend(std::iter::repeat_n(b' ', width - value.len()));
    Ok(())
}

/// Shortest decimal text for an 8-character header field.
fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 8 {
        return plain;
    }
    let int_digits = format!("{:.0}", v.trunc()).len();
    let decimals = 8usize.saturating_sub(int_digits + 1);
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
