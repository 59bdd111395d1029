"""Writes the two-service fixture: car and person share eight class templates
verbatim, so the syntax of CarMapper and PersonMapper is identical and only the
domain words differ."""

import pathlib

ROOT = pathlib.Path(__file__).resolve().parent

DOMAINS = {
    "car": {"Noun": "Car", "noun": "car", "extra": "plate"},
    "person": {"Noun": "Person", "noun": "person", "extra": "passport"},
}

TEMPLATES = {
    "Controller": """\
public class {Noun}Controller {{
  private final {Noun}Service service;

  public {Noun}Controller({Noun}Service service) {{ this.service = service; }}

  public ResponseEntity handleRequest(HttpRequest request) {{
    String route = request.routePath();
    return ResponseEntity.respond(route, service.lookup(route));
  }}
}}
""",
    "Service": """\
public class {Noun}Service {{
  private final {Noun}Repository repository;

  public {Noun}Service({Noun}Repository repository) {{ this.repository = repository; }}

  public Object lookup(String key) {{
    transactionBegin();
    Object found = repository.load(key);
    transactionCommit();
    return found;
  }}

  private void transactionBegin() {{}}
  private void transactionCommit() {{}}
}}
""",
    "Repository": """\
public class {Noun}Repository {{
  private final DataSource dataSource;

  public {Noun}Repository(DataSource dataSource) {{ this.dataSource = dataSource; }}

  public Object load(String key) {{
    String query = "select row from table where key = ?";
    return dataSource.executeQuery(query, key);
  }}
}}
""",
    "Entity": """\
public class {Noun}Entity {{
  private long identifier;
  private long version;
  private String {extra};

  public long getIdentifier() {{ return identifier; }}
  public long getVersion() {{ return version; }}
}}
""",
    "Dto": """\
public class {Noun}Dto {{
  private String payload;
  private boolean serializable;

  public String toPayload() {{ return payload; }}
}}
""",
    "Mapper": """\
public class {Noun}Mapper {{
  public {Noun}Dto convertToTransfer({Noun}Entity entity) {{
    return new {Noun}Dto();
  }}

  public {Noun}Entity convertFromTransfer({Noun}Dto transfer) {{
    return new {Noun}Entity();
  }}
}}
""",
    "Validator": """\
public class {Noun}Validator {{
  public boolean validateConstraints({Noun}Dto candidate) {{
    ValidationResult result = ValidationResult.check(candidate);
    return result.violations() == 0;
  }}
}}
""",
    "Client": """\
public class {Noun}Client {{
  private final RemoteEndpoint endpoint;

  public {Noun}Client(RemoteEndpoint endpoint) {{ this.endpoint = endpoint; }}

  public String fetchRemote(String resource) {{
    return endpoint.invokeHttp(resource, timeoutMillis());
  }}

  private int timeoutMillis() {{ return 3000; }}
}}
""",
}


def main():
    for domain, words in DOMAINS.items():
        pkg = f"com.twin.{domain}"
        base = ROOT / "repo" / domain / "src" / "main" / "java" / "com" / "twin" / domain
        base.mkdir(parents=True, exist_ok=True)
        for role, body in TEMPLATES.items():
            text = f"package {pkg};\n\n" + body.format(**words)
            (base / f"{words['Noun']}{role}.java").write_text(text)


if __name__ == "__main__":
    main()
