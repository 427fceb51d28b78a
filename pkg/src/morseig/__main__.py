from morseig.cli.cli_main import main

if __name__ == "__main__":
    main()
