from transforma.cli import main

raise SystemExit(main())
