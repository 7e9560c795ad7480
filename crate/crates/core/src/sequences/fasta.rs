use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Alphabet, Sequence, SequenceSet};
use crate::error::{Error, Result};

/// Parses FASTA text. Ids are the header text up to the first whitespace,
/// residues are uppercased and multi-line records are joined.
pub fn parse_fasta<R: BufRead>(reader: R, alphabet: &Alphabet) -> Result<SequenceSet> {
    let mut sequences = Vec::new();
    let mut current: Option<Sequence> = None;

    for (n, line) in reader.split(b'\n').enumerate() {
        let mut line = line?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        let lineno = n + 1;
        if let Some(header) = line.strip_prefix(b">") {
            let header = std::str::from_utf8(header).map_err(|_| Error::Parse {
                line: lineno,
                message: "header is not valid UTF-8".into(),
            })?;
            let id = header.split_whitespace().next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: "empty header".into(),
            })?;
            sequences.extend(current.take());
            current = Some(Sequence {
                id: id.to_string(),
                residues: Vec::new(),
            });
        } else {
            let trimmed = line.trim_ascii();
            if trimmed.is_empty() {
                continue;
            }
            let Some(record) = current.as_mut() else {
                return Err(Error::Parse {
                    line: lineno,
                    message: "sequence data before any '>' header".into(),
                });
            };
            record.residues.extend(trimmed.iter().map(u8::to_ascii_uppercase));
        }
    }
    sequences.extend(current);
    SequenceSet::new(sequences, alphabet)
}

pub fn read_fasta_file(path: &Path, alphabet: &Alphabet) -> Result<SequenceSet> {
    let file = File::open(path)?;
    parse_fasta(BufReader::new(file), alphabet)
}

/// Writes one record per sequence, residues on a single line.
pub fn write_fasta<'a, W, I>(mut writer: W, sequences: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Sequence>,
{
    for s in sequences {
        writer.write_all(b">")?;
        writer.write_all(s.id.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.write_all(&s.residues)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_fasta_file(path: &Path, set: &SequenceSet) -> Result<()> {
    write_fasta(BufWriter::new(File::create(path)?), set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<SequenceSet> {
        parse_fasta(s.as_bytes(), &Alphabet::dna())
    }

    #[test]
    fn single_record() {
        let set = parse(">s1\nATGC\n").unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.sequences()[0], Sequence::new("s1", "ATGC"));
    }

    #[test]
    fn joins_lines_and_uppercases() {
        let set = parse(">s1 some description\nAT\nGC\n>s2\ngg\n").unwrap();
        assert_eq!(set.sequences()[0].id, "s1");
        assert_eq!(set.sequences()[0].residues, b"ATGC");
        assert_eq!(set.sequences()[1].residues, b"GG");
        assert_eq!(set.max_len(), 4);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let set = parse(">a\r\nAT\r\n\r\nGC\r\n").unwrap();
        assert_eq!(set.sequences()[0].residues, b"ATGC");
    }

    #[test]
    fn rejects_foreign_character() {
        match parse(">s1\nATXC\n") {
            Err(Error::InvalidResidue { id, ch, .. }) => {
                assert_eq!(id, "s1");
                assert_eq!(ch, 'X');
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_sequence_before_header() {
        match parse("\nATGC\n>s1\nA\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_record() {
        assert!(parse(">a\n>b\nAT\n").is_err());
    }

    #[test]
    fn extended_alphabet() {
        let a = Alphabet::new(b"ATGCN").unwrap();
        let set = parse_fasta(">s\nATNN\n".as_bytes(), &a).unwrap();
        assert_eq!(set.sequences()[0].residues, b"ATNN");
    }

    proptest! {
        #[test]
        fn write_then_parse_roundtrips(
            records in proptest::collection::vec(("[a-z][a-z0-9_]{0,8}", "[ATGCatgc]{1,80}"), 1..20)
        ) {
            let mut seen = std::collections::HashSet::new();
            let seqs: Vec<Sequence> = records
                .into_iter()
                .filter(|(id, _)| seen.insert(id.clone()))
                .map(|(id, r)| Sequence::new(id, r))
                .collect();
            let set = SequenceSet::new(seqs, &Alphabet::dna()).unwrap();
            let mut buf = Vec::new();
            write_fasta(&mut buf, &set).unwrap();
            let back = parse_fasta(buf.as_slice(), &Alphabet::dna()).unwrap();
            prop_assert_eq!(back, set);
        }
    }
}
