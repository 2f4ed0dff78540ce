from anisolattice.cli import main
raise SystemExit(main())
