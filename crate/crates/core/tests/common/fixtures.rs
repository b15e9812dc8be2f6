//! One small schema per catalog kind, with data and hints where the kind
//! needs them.

use vkg_patterns::engine::HintsDocument;
use vkg_patterns::ingest::{parse_csv_table, parse_schema_auto};
use vkg_patterns::model::{DataInstance, PatternKind, RelationalSchema};

pub struct Fixture {
    pub kind: PatternKind,
    pub schema: &'static str,
    pub data: &'static [(&'static str, &'static str)],
    pub hints: &'static str,
}

impl Fixture {
    pub fn schema(&self) -> RelationalSchema {
        parse_schema_auto(self.schema).expect("fixture schema parses")
    }

    pub fn data(&self) -> Option<DataInstance> {
        if self.data.is_empty() {
            return None;
        }
        let schema = self.schema();
        let mut d = DataInstance::new();
        for (t, csv) in self.data {
            let attrs = schema.table(t).expect("fixture table").attr_names();
            d.insert(*t, parse_csv_table(csv, t, &attrs).expect("fixture csv parses"));
        }
        Some(d)
    }

    pub fn hints(&self) -> HintsDocument {
        if self.hints.is_empty() {
            HintsDocument::default()
        } else {
            HintsDocument::parse(self.hints).expect("fixture hints parse")
        }
    }
}

const PERSON: &str = "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);";
const PERSON_ROWS: (&str, &str) = ("person", "ssn,name\np1,Ann\np2,Bob\np3,Cid\np4,Ann\n");
const COURSE_ROWS: (&str, &str) = ("course", "cid,title\nc1,Logic\nc2,Databases\nc3,Logic\n");

pub fn fixtures() -> Vec<Fixture> {
    use PatternKind::*;
    vec![
        Fixture {
            kind: SE,
            schema: PERSON,
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SR,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE attends (ssn TEXT REFERENCES person, cid TEXT REFERENCES course,
                                           PRIMARY KEY (ssn, cid));",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SRa,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, code TEXT NOT NULL UNIQUE, title TEXT);
                     CREATE TABLE enrol (ssn TEXT REFERENCES person, code TEXT REFERENCES course (code),
                                         PRIMARY KEY (ssn, code));",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SRm,
            schema: "CREATE TABLE department (did TEXT PRIMARY KEY, dname TEXT);
                     CREATE TABLE employee (eid TEXT PRIMARY KEY, ename TEXT, dept TEXT REFERENCES department);",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SRR,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE exam (ssn TEXT REFERENCES person, cid TEXT REFERENCES course, grade TEXT,
                                        PRIMARY KEY (ssn, cid));",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SH,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE student (ssn TEXT PRIMARY KEY REFERENCES person, matr TEXT);",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SHa,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE student (sid TEXT PRIMARY KEY, ssn TEXT NOT NULL UNIQUE REFERENCES person, matr TEXT);",
            data: &[],
            hints: "",
        },
        Fixture {
            kind: SHaa,
            schema: r#"{"tables": [
                {"name": "people", "attributes": ["id", "role", "name"], "primaryKey": ["id", "role"]},
                {"name": "grads", "attributes": ["id", "thesis"], "primaryKey": ["id"],
                 "inclusionDeps": [{"source": [{"const": "GraduateStudent"}, "id"],
                                    "targetTable": "people", "target": ["role", "id"]}]}
            ]}"#,
            data: &[],
            hints: "",
        },
        Fixture {
            kind: DE,
            schema: "CREATE TABLE person (ssn TEXT, name TEXT);",
            data: &[PERSON_ROWS],
            hints: "",
        },
        Fixture {
            kind: DR,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE attends (ssn TEXT, cid TEXT);",
            data: &[
                PERSON_ROWS,
                COURSE_ROWS,
                ("attends", "ssn,cid\np1,c1\np1,c2\np2,c1\np3,c3\np4,c2\n"),
            ],
            hints: "",
        },
        Fixture {
            kind: DRa,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, code TEXT NOT NULL UNIQUE, title TEXT);
                     CREATE TABLE enrol (ssn TEXT, code TEXT);",
            data: &[
                PERSON_ROWS,
                ("course", "cid,code,title\nc1,L-1,Logic\nc2,D-2,Databases\nc3,L-3,Logic\n"),
                ("enrol", "ssn,code\np1,L-1\np1,D-2\np2,L-1\np3,L-3\np4,D-2\n"),
            ],
            hints: "",
        },
        Fixture {
            kind: DRm,
            schema: "CREATE TABLE department (did TEXT PRIMARY KEY, dname TEXT);
                     CREATE TABLE employee (eid TEXT PRIMARY KEY, ename TEXT, dept TEXT);",
            data: &[
                ("department", "did,dname\nd1,Sales\nd2,Research\nd3,Sales\n"),
                ("employee", "eid,ename,dept\ne1,Ann,d1\ne2,Bob,d1\ne3,Cid,d2\ne4,Ann,d3\n"),
            ],
            hints: "",
        },
        Fixture {
            kind: DRR,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE exam (ssn TEXT, cid TEXT, grade TEXT);",
            data: &[
                PERSON_ROWS,
                COURSE_ROWS,
                ("exam", "ssn,cid,grade\np1,c1,A\np1,c2,A\np2,c1,A\np2,c2,B\np3,c3,B\n"),
            ],
            hints: "",
        },
        Fixture {
            kind: DH,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE student (ssn TEXT PRIMARY KEY, matr TEXT);",
            data: &[PERSON_ROWS, ("student", "ssn,matr\np1,m1\np3,m3\n")],
            hints: "",
        },
        Fixture {
            kind: DHa,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE student (sid TEXT PRIMARY KEY, ssn TEXT NOT NULL UNIQUE, matr TEXT);",
            data: &[PERSON_ROWS, ("student", "sid,ssn,matr\ns1,p1,m1\ns3,p3,m1\n")],
            hints: "",
        },
        Fixture {
            kind: DHaa,
            schema: "CREATE TABLE people (id TEXT, role TEXT, name TEXT, PRIMARY KEY (id, role));
                     CREATE TABLE grads (id TEXT PRIMARY KEY, thesis TEXT);",
            data: &[
                (
                    "people",
                    "id,role,name\n1,GraduateStudent,Ann\n2,GraduateStudent,Bob\n1,Faculty,Cid\n3,Faculty,Cid\n",
                ),
                ("grads", "id,thesis\n1,Logic\n2,Logic\n"),
            ],
            hints: "",
        },
        Fixture {
            kind: DR1Nm,
            schema: "CREATE TABLE students (id TEXT PRIMARY KEY, name TEXT, course_id TEXT, course_name TEXT);",
            data: &[(
                "students",
                "id,name,course_id,course_name\n1,Ann,c1,Logic\n2,Bob,c1,Logic\n3,Cid,c2,Algebra\n4,Ann,c3,Algebra\n",
            )],
            hints: "",
        },
        Fixture {
            kind: DR11m,
            schema: "CREATE TABLE university (uid TEXT PRIMARY KEY, uname TEXT, rector_ssn TEXT UNIQUE, rector_name TEXT);",
            data: &[(
                "university",
                "uid,uname,rector_ssn,rector_name\nu1,Bolzano,r1,Ann\nu2,Trento,r2,Bob\nu3,Verona,r3,Ann\n",
            )],
            hints: r#"{"attributeOwnership": {"university": {"rector_ssn": "Rector", "rector_name": "Rector"}}}"#,
        },
        Fixture {
            kind: DH01,
            schema: "CREATE TABLE person (ssn TEXT PRIMARY KEY, name TEXT);
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE attends (ssn TEXT PRIMARY KEY REFERENCES person, cid TEXT NOT NULL REFERENCES course);",
            data: &[PERSON_ROWS, COURSE_ROWS, ("attends", "ssn,cid\np1,c1\np2,c1\n")],
            hints: "",
        },
        Fixture {
            kind: CE2C,
            schema: "CREATE TABLE people (id TEXT PRIMARY KEY, name TEXT, gender TEXT);",
            data: &[("people", "id,name,gender\n1,Ann,F\n2,Bob,M\n3,Cid,M\n")],
            hints: r#"{"clusterCandidates": [{"table": "people", "attrs": ["gender"], "flavor": "CE2C"}]}"#,
        },
        Fixture {
            kind: CE2D,
            schema: "CREATE TABLE people (id TEXT PRIMARY KEY, name TEXT, gender TEXT);",
            data: &[("people", "id,name,gender\n1,Ann,F\n2,Bob,M\n3,Cid,M\n")],
            hints: r#"{"clusterCandidates": [{"table": "people", "attrs": ["gender"], "flavor": "CE2D",
                       "property": "hasGender", "invention": {"F": "Female", "M": "Male"}}]}"#,
        },
        Fixture {
            kind: CE2O,
            schema: "CREATE TABLE people (id TEXT PRIMARY KEY, name TEXT, gender TEXT);",
            data: &[("people", "id,name,gender\n1,Ann,F\n2,Bob,M\n3,Cid,M\n")],
            hints: r#"{"clusterCandidates": [{"table": "people", "attrs": ["gender"], "flavor": "CE2O",
                       "property": "gender", "template": ":gender/{gender}"}]}"#,
        },
        Fixture {
            kind: CR2O,
            schema: "CREATE TABLE professor (pid TEXT, rank TEXT, name TEXT, PRIMARY KEY (pid, rank));
                     CREATE TABLE course (cid TEXT PRIMARY KEY, title TEXT);
                     CREATE TABLE teaches (pid TEXT, rank TEXT, cid TEXT REFERENCES course,
                                           PRIMARY KEY (pid, rank, cid),
                                           FOREIGN KEY (pid, rank) REFERENCES professor (pid, rank));",
            data: &[
                ("professor", "pid,rank,name\nx1,full,Ann\nx2,associate,Bob\n"),
                COURSE_ROWS,
                ("teaches", "pid,rank,cid\nx1,full,c1\nx1,full,c2\nx2,associate,c1\nx2,associate,c3\n"),
            ],
            hints: r#"{"clusterCandidates": [{"table": "teaches", "attrs": ["rank"], "flavor": "CR2O"}]}"#,
        },
    ]
}
